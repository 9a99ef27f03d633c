#pragma once

// Strong-coupling dephasing of a system coupled to a bath of N independent
// subsystems through g * V0 ⊗ sum_i A_i. The analytic route projects onto the
// V0 eigenbasis; the exact route evolves the full system⊗bath product and
// traces the bath out.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "thermolimit/errors.hpp"
#include "thermolimit/hilbert.hpp"

namespace thermolimit {

inline constexpr double kSpectralGapTol = 1e-10;

/// Diagonal matrix elements of H_S in the V0 eigenbasis, paired with the V0
/// eigenvalues in ascending order.
struct PhaseData {
    std::vector<double> gamma_dot;
    std::vector<double> v;
};

class StrongCouplingModel {
public:
    /// Validates everything up front: Hermiticity, the nondegeneracy of the
    /// V0 spectrum (min gap > 1e-10), and g > 0. The V0 eigenbasis and the
    /// per-branch phase rates are cached for reuse.
    StrongCouplingModel(Operator h_s, Operator v0, long long n, std::vector<double> a_values,
                        double g, std::optional<Operator> h_bath = std::nullopt)
        : h_s_(std::move(h_s)),
          v0_(std::move(v0)),
          n_(n),
          a_values_(std::move(a_values)),
          g_(g),
          h_bath_(std::move(h_bath)) {
        if (!h_s_.hermitian) throw InvalidSpec("StrongCouplingModel: H_S must be Hermitian");
        if (!v0_.hermitian) throw InvalidSpec("StrongCouplingModel: V0 must be Hermitian");
        if (h_s_.dim() != v0_.dim())
            throw DimensionMismatch("StrongCouplingModel: H_S and V0 dimensions differ");
        if (n_ < 1) throw InvalidSpec("StrongCouplingModel: bath size must be >= 1");
        if (static_cast<long long>(a_values_.size()) != n_)
            throw InvalidSpec("StrongCouplingModel: a_values length != bath size");
        // g = 0 is the decoupled limit, kept expressible for oracle checks.
        if (g_ < 0.0) throw InvalidSpec("StrongCouplingModel: g must be nonnegative");
        if (h_bath_ && h_bath_->dim() != 2)
            throw InvalidSpec("StrongCouplingModel: per-site bath Hamiltonian must be 2x2");
        if (h_bath_ && !h_bath_->hermitian)
            throw InvalidSpec("StrongCouplingModel: bath Hamiltonian must be Hermitian");

        v0_decomp_ = herm_eigen(v0_);
        for (Index i = 0; i + 1 < v0_decomp_.eigenvalues.size(); ++i)
            if (v0_decomp_.eigenvalues(i + 1) - v0_decomp_.eigenvalues(i) <= kSpectralGapTol)
                throw DegenerateSpectrum("StrongCouplingModel: V0 spectrum gap <= 1e-10");

        a_bar_ = 0.0;
        for (double a : a_values_) a_bar_ += a;
        a_bar_ /= static_cast<double>(n_);

        gamma_dot_.resize(static_cast<std::size_t>(v0_.dim()));
        for (Index i = 0; i < v0_.dim(); ++i) {
            VectorXc vn = v0_decomp_.eigenvectors.col(i);
            gamma_dot_[static_cast<std::size_t>(i)] = (vn.dot(h_s_.entries * vn)).real();
        }
    }

    const Operator& h_s() const { return h_s_; }
    const Operator& v0() const { return v0_; }
    long long n() const { return n_; }
    const std::vector<double>& a_values() const { return a_values_; }
    double a_bar() const { return a_bar_; }
    double g() const { return g_; }
    const std::optional<Operator>& h_bath() const { return h_bath_; }
    const SpectralDecomp& v0_decomp() const { return v0_decomp_; }
    Index system_dim() const { return h_s_.dim(); }

    /// Total phase rate of the (m,n) coherence in the V0 eigenbasis.
    double phase_rate(Index m, Index n) const {
        const auto mi = static_cast<std::size_t>(m), ni = static_cast<std::size_t>(n);
        return (gamma_dot_[mi] - gamma_dot_[ni]) +
               g_ * static_cast<double>(n_) * a_bar_ *
                   (v0_decomp_.eigenvalues(m) - v0_decomp_.eigenvalues(n));
    }

    const std::vector<double>& gamma_dot() const { return gamma_dot_; }

private:
    Operator h_s_;
    Operator v0_;
    long long n_;
    std::vector<double> a_values_;
    double g_;
    std::optional<Operator> h_bath_;
    SpectralDecomp v0_decomp_;
    std::vector<double> gamma_dot_;
    double a_bar_ = 0.0;
};

inline PhaseData phase_data(const StrongCouplingModel& model) {
    PhaseData pd;
    pd.gamma_dot = model.gamma_dot();
    const auto& ev = model.v0_decomp().eigenvalues;
    pd.v.assign(ev.data(), ev.data() + ev.size());
    return pd;
}

/// Strong-coupling system state: each V0 eigenbranch picks up the phase
/// e^{-i(gamma_dot_n + g N abar v_n) t}. The sign matches the exact
/// propagator when [H_S, V0] = 0 (the bath factor stays the initial product
/// of A_i eigenstates and is not returned).
inline StateVector analytic_state(const StrongCouplingModel& model, const StateVector& psi_s0,
                                  double t) {
    if (psi_s0.dim() != model.system_dim())
        throw DimensionMismatch("analytic_state: system state dimension mismatch");
    const SpectralDecomp& d = model.v0_decomp();
    VectorXc coeff = d.eigenvectors.adjoint() * psi_s0.amplitudes;
    const double nabar = static_cast<double>(model.n()) * model.a_bar();
    for (Index i = 0; i < coeff.size(); ++i) {
        double rate = model.gamma_dot()[static_cast<std::size_t>(i)] +
                      model.g() * nabar * d.eigenvalues(i);
        coeff(i) *= std::exp(Complex(0.0, -rate * t));
    }
    return StateVector(d.eigenvectors * coeff, psi_s0.dims);
}

inline DensityMatrix analytic_rho_s(const StrongCouplingModel& model, const StateVector& psi_s0,
                                    double t) {
    return density_matrix(analytic_state(model, psi_s0, t));
}

namespace detail {

struct ExactPropagator {
    SpectralDecomp decomp;
    StateVector psi0;  // dims = [system, bath]
};

inline ExactPropagator assemble_exact(const StrongCouplingModel& model,
                                      const StateVector& psi_s0) {
    if (psi_s0.dim() != model.system_dim())
        throw DimensionMismatch("exact_rho_s: system state dimension mismatch");
    const long long n = model.n();
    const Index dim_s = model.system_dim();
    if (n > 20 || dim_s * (Index{1} << n) > kBruteForceDimCap)
        throw TooLarge("exact_rho_s: system x bath dimension exceeds 4096");

    const std::vector<Index> bath_dims(static_cast<std::size_t>(n), 2);
    const Index bath_dim = Index{1} << n;

    // Qubit realization of the bath: A_i = sigma_z, |chi_i> in {|0>,|1>}.
    VectorXc chi = VectorXc::Zero(bath_dim);
    Index chi_index = 0;
    for (double a : model.a_values()) {
        Index bit;
        if (std::abs(a - 1.0) <= 1e-12)
            bit = 0;
        else if (std::abs(a + 1.0) <= 1e-12)
            bit = 1;
        else
            throw UnrealizableBathValues("exact_rho_s: bath eigenvalues must be +1 or -1");
        chi_index = 2 * chi_index + bit;
    }
    chi(chi_index) = 1.0;

    const Operator sz = pauli_z();
    MatrixXc bath_coupling = MatrixXc::Zero(bath_dim, bath_dim);
    for (long long i = 0; i < n; ++i)
        bath_coupling += embed(sz, static_cast<std::size_t>(i), bath_dims).entries;
    Operator bath_sum = Operator::hermitian_op(std::move(bath_coupling), {bath_dim});

    MatrixXc h = kron(model.h_s(), identity_op(bath_dim)).entries;
    h += model.g() * kron(model.v0(), bath_sum).entries;
    if (model.h_bath()) {
        MatrixXc bath_h = MatrixXc::Zero(bath_dim, bath_dim);
        for (long long i = 0; i < n; ++i)
            bath_h += embed(*model.h_bath(), static_cast<std::size_t>(i), bath_dims).entries;
        h += kron(identity_op(dim_s), Operator::hermitian_op(std::move(bath_h), {bath_dim}))
                 .entries;
    }

    StateVector psi0 = kron(StateVector(psi_s0.amplitudes, {dim_s}),
                            StateVector(std::move(chi), {bath_dim}));
    return ExactPropagator{
        herm_eigen(Operator::hermitian_op(std::move(h), {dim_s, bath_dim})), std::move(psi0)};
}

}  // namespace detail

/// Full evolution under H_S + sum_i H_i + g V0 ⊗ sum_i A_i, bath traced out.
inline DensityMatrix exact_rho_s(const StrongCouplingModel& model, const StateVector& psi_s0,
                                 double t) {
    auto prop = detail::assemble_exact(model, psi_s0);
    StateVector psi_t = evolve(prop.decomp, prop.psi0, t);
    return reduced_density_matrix(psi_t, {0});
}

/// Grid variant sharing one eigendecomposition across all time points.
inline std::vector<DensityMatrix> exact_rho_s(const StrongCouplingModel& model,
                                              const StateVector& psi_s0,
                                              const std::vector<double>& ts) {
    auto prop = detail::assemble_exact(model, psi_s0);
    std::vector<DensityMatrix> out;
    out.reserve(ts.size());
    for (double t : ts) {
        StateVector psi_t = evolve(prop.decomp, prop.psi0, t);
        out.push_back(reduced_density_matrix(psi_t, {0}));
    }
    return out;
}

/// Slowest interference period 1/(N |abar| g min|v_m - v_n|).
inline double tau_m(const StrongCouplingModel& model) {
    if (model.system_dim() < 2)
        throw UndefinedTimescale("tau_m: system dimension is 1");
    if (std::abs(model.a_bar()) < 1e-15)
        throw UndefinedTimescale("tau_m: bath eigenvalue mean is zero");
    if (model.g() == 0.0) throw UndefinedTimescale("tau_m: decoupled model has no timescale");
    const auto& v = model.v0_decomp().eigenvalues;
    double min_gap = v(1) - v(0);
    for (Index i = 1; i + 1 < v.size(); ++i) min_gap = std::min(min_gap, v(i + 1) - v(i));
    return 1.0 / (static_cast<double>(model.n()) * std::abs(model.a_bar()) * model.g() * min_gap);
}

/// Entrywise trapezoidal average of density matrices on a uniform grid.
inline DensityMatrix time_averaged_rho(const std::vector<DensityMatrix>& series) {
    if (series.size() < 2) throw EmptySeries("time_averaged_rho: need at least 2 samples");
    MatrixXc acc = 0.5 * (series.front().entries + series.back().entries);
    for (std::size_t i = 1; i + 1 < series.size(); ++i) acc += series[i].entries;
    acc /= static_cast<double>(series.size() - 1);
    return DensityMatrix(std::move(acc), series.front().dims);
}

/// sqrt(sum_{m != n} |rho_mn|^2) in the given eigenbasis.
inline double offdiagonal_norm(const DensityMatrix& rho, const SpectralDecomp& basis) {
    if (basis.eigenvectors.rows() != rho.dim())
        throw DimensionMismatch("offdiagonal_norm: basis/state dimension mismatch");
    MatrixXc r = basis.eigenvectors.adjoint() * rho.entries * basis.eigenvectors;
    double acc = 0.0;
    for (Index m = 0; m < r.rows(); ++m)
        for (Index n = 0; n < r.cols(); ++n)
            if (m != n) acc += std::norm(r(m, n));
    return std::sqrt(acc);
}

}  // namespace thermolimit
