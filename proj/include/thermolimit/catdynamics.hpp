#pragma once

// Truncated-Fock dynamics of a field mode coupled to the collective bath
// observable: H = omega a†a + (gamma a† + gamma* a) * (N abar). With the bath
// in a collective eigenstate the propagator factorizes exactly into
// e^{i xi(t)} e^{-i omega a†a t} D(beta(t)); cat-state branches stay coherent
// states with computable phases. The brute-force route exponentiates the
// truncated Hamiltonian and validates all of it.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "thermolimit/errors.hpp"
#include "thermolimit/hilbert.hpp"

namespace thermolimit {

inline constexpr Index kFockCutoffCap = 512;
inline constexpr double kTailTol = 1e-8;

/// State in the number basis |0..cutoff|. The top four levels must stay
/// essentially unpopulated; a violation means the truncation was too small
/// for whatever produced the state.
struct FockState {
    VectorXc amplitudes;
    Index cutoff;

    FockState(VectorXc amps, Index cut) : amplitudes(std::move(amps)), cutoff(cut) {
        if (cutoff < 1) throw InvalidSpec("FockState: cutoff must be positive");
        if (amplitudes.size() != cutoff + 1)
            throw DimensionMismatch("FockState: amplitude count != cutoff + 1");
        if (std::abs(amplitudes.norm() - 1.0) > kNormTol)
            throw InvalidSpec("FockState: state not normalized");
        double tail = 0.0;
        for (Index n = std::max<Index>(cutoff - 3, 1); n <= cutoff; ++n)
            tail += std::norm(amplitudes(n));
        if (tail > kTailTol)
            throw InadequateCutoff("FockState: truncation tail population above 1e-8");
    }

    StateVector as_state_vector() const { return StateVector(amplitudes, {cutoff + 1}); }
};

/// Smallest cutoff whose Poisson tail is negligible for occupation B,
/// B = (max displacement amplitude)^2.
inline Index adequate_cutoff(double max_amplitude) {
    const double b = max_amplitude * max_amplitude;
    return static_cast<Index>(std::ceil(b + 6.0 * std::sqrt(b) + 9.0));
}

struct CatModel {
    double omega;     // field frequency
    Complex gamma;    // coupling amplitude
    double alpha;     // cat radius, >= 0
    double phi;       // cat half-angle
    long long n;      // bath size
    double a_bar;     // bath eigenvalue mean
    Index cutoff;

    CatModel(double omega_, Complex gamma_, double alpha_, double phi_, long long n_,
             double a_bar_, Index cutoff_)
        : omega(omega_), gamma(gamma_), alpha(alpha_), phi(phi_), n(n_), a_bar(a_bar_),
          cutoff(cutoff_) {
        if (!(omega > 0.0)) throw InvalidSpec("CatModel: omega must be positive");
        if (alpha < 0.0) throw InvalidSpec("CatModel: alpha must be >= 0");
        if (n < 1) throw InvalidSpec("CatModel: n must be >= 1");
        if (cutoff < 1) throw InvalidSpec("CatModel: cutoff must be positive");
        if (cutoff < adequate_cutoff(beta_max() + alpha))
            throw InadequateCutoff("CatModel: cutoff below the adequacy rule for |beta|max + alpha");
    }

    double n_abar() const { return static_cast<double>(n) * a_bar; }
    double beta_max() const { return 2.0 * std::abs(n_abar() * gamma) / omega; }

    Complex beta(double t) const {
        return n_abar() * gamma / omega * (1.0 - std::exp(Complex(0.0, omega * t)));
    }

    double xi(double t) const {
        const double na = n_abar();
        return na * na * std::norm(gamma) / (omega * omega) * (omega * t - std::sin(omega * t));
    }
};

struct WignerGrid {
    std::vector<double> x_axis;
    std::vector<double> p_axis;
    Eigen::MatrixXd values;  // values(i, j) = W(x_axis[i], p_axis[j])
};

namespace detail {

// Truncated coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!), renormalized.
inline VectorXc coherent_amplitudes(Complex alpha, Index cutoff) {
    VectorXc c(cutoff + 1);
    c(0) = 1.0;
    for (Index n = 1; n <= cutoff; ++n)
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    c /= c.norm();
    return c;
}

inline Complex coherent_overlap(Complex mu, Complex nu) {
    return std::exp(-0.5 * std::norm(mu) - 0.5 * std::norm(nu) + std::conj(mu) * nu);
}

// One-time spectral split of the displacement generator: with
// lambda = r e^{i theta},  D(lambda) = e^{i theta n̂} e^{r(a† - a)} e^{-i theta n̂},
// so a single decomposition of i(a† - a) serves every displacement at this
// cutoff. Exact in the truncated basis.
class DisplacementEngine {
public:
    explicit DisplacementEngine(Index cutoff) : dim_(cutoff + 1) {
        MatrixXc m = MatrixXc::Zero(dim_, dim_);
        for (Index n = 1; n < dim_; ++n) {
            const double s = std::sqrt(static_cast<double>(n));
            m(n, n - 1) = Complex(0.0, 1.0) * s;   // i a†
            m(n - 1, n) = Complex(0.0, -1.0) * s;  // -i a
        }
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(m);
        mu_ = es.eigenvalues();
        u_ = es.eigenvectors();
    }

    VectorXc apply(Complex lambda, const VectorXc& amps) const {
        if (amps.size() != dim_)
            throw DimensionMismatch("DisplacementEngine: amplitude size mismatch");
        const double r = std::abs(lambda);
        if (r == 0.0) return amps;
        const double theta = std::arg(lambda);
        VectorXc v(dim_);
        for (Index n = 0; n < dim_; ++n)
            v(n) = amps(n) * std::exp(Complex(0.0, -theta * static_cast<double>(n)));
        VectorXc w = u_.adjoint() * v;
        for (Index k = 0; k < dim_; ++k) w(k) *= std::exp(Complex(0.0, -r * mu_(k)));
        v = u_ * w;
        for (Index n = 0; n < dim_; ++n)
            v(n) *= std::exp(Complex(0.0, theta * static_cast<double>(n)));
        return v;
    }

    /// W(lambda) = (1/pi) <D(-lambda)psi| parity |D(-lambda)psi>,
    /// normalized so the (x,p) integral with a = (x+ip)/sqrt(2) is 1.
    double wigner_point(Complex lambda, const FockState& state) const {
        FockState displaced(apply(-lambda, state.amplitudes), state.cutoff);
        Complex acc{};
        for (Index n = 0; n <= state.cutoff; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            acc += sign * std::conj(displaced.amplitudes(n)) * displaced.amplitudes(n);
        }
        if (std::abs(acc.imag()) > 1e-10)
            throw Error("wigner: imaginary residue above 1e-10");
        return acc.real() / M_PI;
    }

private:
    Index dim_;
    Eigen::VectorXd mu_;
    MatrixXc u_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// State constructors
// ---------------------------------------------------------------------------

inline FockState coherent_state(Complex alpha, Index cutoff) {
    if (cutoff < 1) throw InvalidSpec("coherent_state: cutoff must be positive");
    return FockState(detail::coherent_amplitudes(alpha, cutoff), cutoff);
}

/// e^{beta a† - beta* a} applied in the truncated basis.
inline FockState displacement_apply(Complex beta, const FockState& state) {
    detail::DisplacementEngine engine(state.cutoff);
    return FockState(engine.apply(beta, state.amplitudes), state.cutoff);
}

/// Normalized |alpha e^{i phi}> + |alpha e^{-i phi}> superposition. The
/// normalization constant uses the exact coherent overlap; the truncated
/// vector is then renormalized like any other constructor output.
inline FockState cat_state(double alpha, double phi, Index cutoff) {
    if (alpha < 0.0) throw InvalidSpec("cat_state: alpha must be >= 0");
    const Complex b1 = alpha * std::exp(Complex(0.0, phi));
    const Complex b2 = alpha * std::exp(Complex(0.0, -phi));
    VectorXc amps = detail::coherent_amplitudes(b1, cutoff) + detail::coherent_amplitudes(b2, cutoff);
    const double norm_sq = 2.0 + 2.0 * detail::coherent_overlap(b1, b2).real();
    amps *= 1.0 / std::sqrt(norm_sq);
    double n = amps.norm();
    if (n == 0.0) throw InvalidSpec("cat_state: degenerate superposition");
    return FockState(amps / n, cutoff);
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

struct CatEvolution {
    FockState state;
    double xi = 0.0;
    Complex beta_t{};
    double phi1 = 0.0;
    double phi2 = 0.0;
    double raw_norm = 1.0;  // norm of the formula state before renormalization
};

/// Closed-form evolution of the cat under the factorized propagator. Branch
/// phases come straight from the displacement composition law; their imaginary
/// parts must vanish and are checked.
inline CatEvolution analytic_evolve(const CatModel& model, double t) {
    const Complex beta = model.beta(t);
    const double xi = model.xi(t);
    const Complex c1 = model.alpha * std::exp(Complex(0.0, model.phi));
    const Complex c2 = model.alpha * std::exp(Complex(0.0, -model.phi));

    const Complex i{0.0, 1.0};
    const Complex phi1_c = -i * 0.5 * model.alpha *
                           (beta * std::exp(-i * model.phi) - std::conj(beta) * std::exp(i * model.phi));
    const Complex phi2_c = -i * 0.5 * model.alpha *
                           (beta * std::exp(i * model.phi) - std::conj(beta) * std::exp(-i * model.phi));
    if (std::abs(phi1_c.imag()) > 1e-12 || std::abs(phi2_c.imag()) > 1e-12)
        throw Error("analytic_evolve: branch phase not real");
    const double phi1 = phi1_c.real();
    const double phi2 = phi2_c.real();

    const Complex rot = std::exp(Complex(0.0, -model.omega * t));
    const Complex branch1 = (beta + c1) * rot;
    const Complex branch2 = (beta + c2) * rot;

    const double norm_sq = 2.0 + 2.0 * detail::coherent_overlap(c1, c2).real();
    VectorXc amps =
        std::exp(i * phi1) * detail::coherent_amplitudes(branch1, model.cutoff) +
        std::exp(i * phi2) * detail::coherent_amplitudes(branch2, model.cutoff);
    amps *= std::exp(i * xi) / std::sqrt(norm_sq);

    const double raw_norm = amps.norm();
    return CatEvolution{FockState(amps / raw_norm, model.cutoff), xi, beta, phi1, phi2, raw_norm};
}

namespace detail {

inline SpectralDecomp cat_hamiltonian_decomp(const CatModel& model) {
    const Index dim = model.cutoff + 1;
    MatrixXc h = MatrixXc::Zero(dim, dim);
    const Complex drive = model.n_abar() * model.gamma;
    for (Index n = 0; n < dim; ++n) {
        h(n, n) = model.omega * static_cast<double>(n);
        if (n > 0) {
            const double s = std::sqrt(static_cast<double>(n));
            h(n, n - 1) = drive * s;             // gamma a†
            h(n - 1, n) = std::conj(drive) * s;  // gamma* a
        }
    }
    return herm_eigen(Operator::hermitian_op(std::move(h), {dim}));
}

}  // namespace detail

/// Direct matrix-exponential evolution of the truncated Hamiltonian.
inline FockState brute_force_evolve(const CatModel& model, double t) {
    if (model.cutoff > kFockCutoffCap)
        throw TooLarge("brute_force_evolve: cutoff exceeds 512");
    auto decomp = detail::cat_hamiltonian_decomp(model);
    StateVector psi = evolve(decomp, cat_state(model.alpha, model.phi, model.cutoff).as_state_vector(), t);
    return FockState(psi.amplitudes, model.cutoff);
}

/// Grid variant sharing one eigendecomposition across all time points.
inline std::vector<FockState> brute_force_evolve(const CatModel& model,
                                                 const std::vector<double>& ts) {
    if (model.cutoff > kFockCutoffCap)
        throw TooLarge("brute_force_evolve: cutoff exceeds 512");
    auto decomp = detail::cat_hamiltonian_decomp(model);
    StateVector psi0 = cat_state(model.alpha, model.phi, model.cutoff).as_state_vector();
    std::vector<FockState> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(FockState(evolve(decomp, psi0, t).amplitudes, model.cutoff));
    return out;
}

// ---------------------------------------------------------------------------
// Phase-space diagnostics
// ---------------------------------------------------------------------------

struct WignerGridSpec {
    double x_min, x_max;
    double p_min, p_max;
    Index nx, np;
};

/// Displaced-parity Wigner function on a rectangular (x, p) grid, convention
/// [x, p] = i and a = (x + ip)/sqrt(2).
inline WignerGrid wigner(const FockState& state, const WignerGridSpec& spec) {
    if (spec.nx < 2 || spec.np < 2) throw InvalidSpec("wigner: grid needs >= 2 points per axis");
    if (!(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min))
        throw InvalidSpec("wigner: empty grid range");
    WignerGrid grid;
    grid.x_axis.resize(static_cast<std::size_t>(spec.nx));
    grid.p_axis.resize(static_cast<std::size_t>(spec.np));
    for (Index i = 0; i < spec.nx; ++i)
        grid.x_axis[static_cast<std::size_t>(i)] =
            spec.x_min + (spec.x_max - spec.x_min) * static_cast<double>(i) /
                             static_cast<double>(spec.nx - 1);
    for (Index j = 0; j < spec.np; ++j)
        grid.p_axis[static_cast<std::size_t>(j)] =
            spec.p_min + (spec.p_max - spec.p_min) * static_cast<double>(j) /
                             static_cast<double>(spec.np - 1);

    detail::DisplacementEngine engine(state.cutoff);
    grid.values.resize(spec.nx, spec.np);
    for (Index i = 0; i < spec.nx; ++i)
        for (Index j = 0; j < spec.np; ++j) {
            const Complex lambda{grid.x_axis[static_cast<std::size_t>(i)] / std::sqrt(2.0),
                                 grid.p_axis[static_cast<std::size_t>(j)] / std::sqrt(2.0)};
            grid.values(i, j) = engine.wigner_point(lambda, state);
        }
    return grid;
}

struct InterferenceMetrics {
    double phase_gap = 0.0;         // |phi1 - phi2|, grows linearly in N
    double separation_ratio = 0.0;  // 2 alpha |sin phi| / |beta(t)|, shrinks as 1/N
    double fringe_visibility = 0.0; // Wigner fringe peak over lobe peak
};

/// Scalar diagnostics of how the interference pattern scales with N.
/// separation_ratio is +inf when beta(t) = 0 (free rotation instants).
inline InterferenceMetrics interference_metrics(const CatModel& model, double t) {
    CatEvolution ev = analytic_evolve(model, t);
    InterferenceMetrics m;
    m.phase_gap = std::abs(ev.phi1 - ev.phi2);

    const double separation = 2.0 * model.alpha * std::abs(std::sin(model.phi));
    // beta(t) vanishes at multiples of 2 pi / omega; treat round-off residue
    // of the 1 - e^{i omega t} factor as zero.
    const double beta_scale = std::abs(model.n_abar() * model.gamma) / model.omega;
    m.separation_ratio = std::abs(ev.beta_t) <= 1e-12 * beta_scale
                             ? std::numeric_limits<double>::infinity()
                             : separation / std::abs(ev.beta_t);

    const Complex rot = std::exp(Complex(0.0, -model.omega * t));
    const Complex b1 = (ev.beta_t + model.alpha * std::exp(Complex(0.0, model.phi))) * rot;
    const Complex b2 = (ev.beta_t + model.alpha * std::exp(Complex(0.0, -model.phi))) * rot;
    const Complex delta = b1 - b2;

    if (std::abs(delta) < 1e-9) {
        m.fringe_visibility = 1.0;  // branches coincide; no distinct fringe
        return m;
    }
    const Complex mid = 0.5 * (b1 + b2);
    const Complex dir = Complex(0.0, 1.0) * delta / std::abs(delta);
    // Fringe phase advances at 2|delta| per unit arc length; keep the window
    // inside the Gaussian envelope.
    const double half_window = std::min(1.5 * M_PI / std::abs(delta), 2.0);

    // Displacing onto a lobe parks the other branch |delta| away, so the
    // sampling needs more truncation headroom than the state itself; padding
    // with zero amplitudes is exact.
    const Index needed = adequate_cutoff(std::abs(delta) + half_window + 0.5);
    FockState probe = ev.state;
    if (needed > probe.cutoff) {
        VectorXc amps = VectorXc::Zero(needed + 1);
        amps.head(model.cutoff + 1) = ev.state.amplitudes;
        probe = FockState(std::move(amps), needed);
    }
    detail::DisplacementEngine engine(probe.cutoff);

    const Index samples = 257;
    double fringe_peak = 0.0;
    for (Index k = 0; k < samples; ++k) {
        const double s = -half_window +
                         2.0 * half_window * static_cast<double>(k) / static_cast<double>(samples - 1);
        fringe_peak = std::max(fringe_peak,
                               std::abs(engine.wigner_point(mid + s * dir, probe)));
    }
    const double lobe_peak = std::max(engine.wigner_point(b1, probe),
                                      engine.wigner_point(b2, probe));
    m.fringe_visibility = fringe_peak / lobe_peak;
    return m;
}

}  // namespace thermolimit
