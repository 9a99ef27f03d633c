#pragma once

// Exact finite-dimensional quantum mechanics on dense complex matrices.
// Everything is a pure function of immutable values; matrix exponentials go
// through the Hermitian eigendecomposition so a decomposition can be reused
// across a time grid.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numeric>
#include <utility>
#include <vector>

#include "thermolimit/errors.hpp"

namespace thermolimit {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kHermTol = 1e-12;   // max-entry deviation of M - M†
inline constexpr double kNormTol = 1e-10;   // state normalization
inline constexpr double kTraceTol = 1e-10;  // density-matrix trace
inline constexpr double kPsdTol = 1e-10;    // allowed negative eigenvalue slack

// Shared cap on every brute-force tensor-product path.
inline constexpr Index kBruteForceDimCap = 4096;

namespace detail {

inline Index product(const std::vector<Index>& dims) {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

inline double hermiticity_defect(const MatrixXc& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Row-major tensor layout: factor 0 owns the coarsest blocks of the flat index.
inline std::vector<Index> strides(const std::vector<Index>& dims) {
    std::vector<Index> s(dims.size());
    Index acc = 1;
    for (std::size_t f = dims.size(); f-- > 0;) {
        s[f] = acc;
        acc *= dims[f];
    }
    return s;
}

// Flat offsets contributed by one subset of tensor factors, enumerated over
// all digit combinations of that subset (in original factor order).
inline std::vector<Index> subset_offsets(const std::vector<Index>& dims,
                                         const std::vector<Index>& all_strides,
                                         const std::vector<std::size_t>& factors) {
    Index count = 1;
    for (std::size_t f : factors) count *= dims[f];
    std::vector<Index> offsets(static_cast<std::size_t>(count), 0);
    Index repeat = count;
    for (std::size_t f : factors) {
        repeat /= dims[f];
        Index period = repeat * dims[f];
        for (Index i = 0; i < count; ++i) {
            Index digit = (i % period) / repeat;
            offsets[static_cast<std::size_t>(i)] += digit * all_strides[f];
        }
    }
    return offsets;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Normalized pure state over a tensor-product Hilbert space.
struct StateVector {
    VectorXc amplitudes;
    std::vector<Index> dims;

    StateVector(VectorXc amps, std::vector<Index> d)
        : amplitudes(std::move(amps)), dims(std::move(d)) {
        if (detail::product(dims) != amplitudes.size())
            throw DimensionMismatch("StateVector: product of dims != amplitude count");
        if (std::abs(amplitudes.norm() - 1.0) > kNormTol)
            throw InvalidSpec("StateVector: state not normalized");
    }

    /// Rescales to unit norm before constructing.
    static StateVector normalized(VectorXc amps, std::vector<Index> d) {
        double n = amps.norm();
        if (n == 0.0) throw InvalidSpec("StateVector: zero vector");
        return StateVector(amps / n, std::move(d));
    }

    Index dim() const { return amplitudes.size(); }
};

/// Square operator with tensor-factor metadata. The hermitian flag is
/// verified at construction (1e-12 max-entry tolerance).
struct Operator {
    MatrixXc entries;
    std::vector<Index> dims;
    bool hermitian = false;

    static Operator hermitian_op(MatrixXc m, std::vector<Index> d) {
        check_shape(m, d);
        if (detail::hermiticity_defect(m) > kHermTol)
            throw NotHermitian("Operator: hermiticity defect above 1e-12");
        return Operator{std::move(m), std::move(d), true};
    }

    static Operator general(MatrixXc m, std::vector<Index> d) {
        check_shape(m, d);
        return Operator{std::move(m), std::move(d), false};
    }

    Index dim() const { return entries.rows(); }

private:
    static void check_shape(const MatrixXc& m, const std::vector<Index>& d) {
        if (m.rows() != m.cols())
            throw DimensionMismatch("Operator: matrix not square");
        if (detail::product(d) != m.rows())
            throw DimensionMismatch("Operator: product of dims != matrix dimension");
    }
};

/// Unit-trace positive Hermitian matrix. Validated on construction.
struct DensityMatrix {
    MatrixXc entries;
    std::vector<Index> dims;

    DensityMatrix(MatrixXc m, std::vector<Index> d)
        : entries(std::move(m)), dims(std::move(d)) {
        if (entries.rows() != entries.cols())
            throw DimensionMismatch("DensityMatrix: matrix not square");
        if (detail::product(dims) != entries.rows())
            throw DimensionMismatch("DensityMatrix: product of dims != matrix dimension");
        if (detail::hermiticity_defect(entries) > kHermTol)
            throw NotHermitian("DensityMatrix: hermiticity defect above 1e-12");
        if (std::abs(entries.trace().real() - 1.0) > kTraceTol ||
            std::abs(entries.trace().imag()) > kTraceTol)
            throw InvalidSpec("DensityMatrix: trace != 1");
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(entries, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -kPsdTol)
            throw InvalidSpec("DensityMatrix: negative eigenvalue beyond tolerance");
    }

    Index dim() const { return entries.rows(); }
};

/// Eigenvalues ascending; eigenvector columns orthonormal.
struct SpectralDecomp {
    Eigen::VectorXd eigenvalues;
    MatrixXc eigenvectors;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Kronecker product; the left factor indexes the coarse blocks.
inline Operator kron(const Operator& a, const Operator& b) {
    const Index ra = a.dim(), rb = b.dim();
    MatrixXc out(ra * rb, ra * rb);
    for (Index i = 0; i < ra; ++i)
        for (Index j = 0; j < ra; ++j)
            out.block(i * rb, j * rb, rb, rb) = a.entries(i, j) * b.entries;
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    if (a.hermitian && b.hermitian) return Operator::hermitian_op(std::move(out), std::move(dims));
    return Operator::general(std::move(out), std::move(dims));
}

/// Product state |a> ⊗ |b>.
inline StateVector kron(const StateVector& a, const StateVector& b) {
    const Index da = a.dim(), db = b.dim();
    VectorXc out(da * db);
    for (Index i = 0; i < da; ++i)
        out.segment(i * db, db) = a.amplitudes(i) * b.amplitudes;
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return StateVector(std::move(out), std::move(dims));
}

/// I ⊗ ... ⊗ op ⊗ ... ⊗ I with `op` occupying tensor factor `slot` of `dims`.
inline Operator embed(const Operator& op, std::size_t slot, const std::vector<Index>& dims) {
    if (slot >= dims.size()) throw BadFactorIndex("embed: slot out of range");
    if (op.dim() != dims[slot]) throw DimensionMismatch("embed: operator does not fit slot");
    Index outer = 1, inner = 1;
    for (std::size_t f = 0; f < slot; ++f) outer *= dims[f];
    for (std::size_t f = slot + 1; f < dims.size(); ++f) inner *= dims[f];
    const Index d = dims[slot];
    const Index total = outer * d * inner;
    MatrixXc out = MatrixXc::Zero(total, total);
    for (Index a = 0; a < outer; ++a)
        for (Index x = 0; x < d; ++x)
            for (Index y = 0; y < d; ++y) {
                if (op.entries(x, y) == Complex{}) continue;
                for (Index r = 0; r < inner; ++r)
                    out((a * d + x) * inner + r, (a * d + y) * inner + r) = op.entries(x, y);
            }
    return Operator{std::move(out), dims, op.hermitian};
}

inline SpectralDecomp herm_eigen(const Operator& h) {
    if (!h.hermitian) throw NotHermitian("herm_eigen: operator not flagged Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h.entries);
    if (es.info() != Eigen::Success)
        throw Error("herm_eigen: eigensolver failed to converge");
    return SpectralDecomp{es.eigenvalues(), es.eigenvectors()};
}

/// e^{-iHt}|psi> synthesized from a precomputed decomposition of H.
inline StateVector evolve(const SpectralDecomp& decomp, const StateVector& psi, double t) {
    if (decomp.eigenvectors.rows() != psi.dim())
        throw DimensionMismatch("evolve: operator/state dimension mismatch");
    VectorXc coeff = decomp.eigenvectors.adjoint() * psi.amplitudes;
    for (Index n = 0; n < coeff.size(); ++n)
        coeff(n) *= std::exp(Complex(0.0, -decomp.eigenvalues(n) * t));
    return StateVector(decomp.eigenvectors * coeff, psi.dims);
}

inline StateVector evolve(const Operator& h, const StateVector& psi, double t) {
    if (h.dim() != psi.dim())
        throw DimensionMismatch("evolve: operator/state dimension mismatch");
    return evolve(herm_eigen(h), psi, t);
}

inline Complex expectation(const Operator& a, const StateVector& psi) {
    if (a.dim() != psi.dim())
        throw DimensionMismatch("expectation: operator/state dimension mismatch");
    return psi.amplitudes.dot(a.entries * psi.amplitudes);
}

/// <A> and <A^2>-<A>^2 for Hermitian A in one pass (A^2 via |A psi|^2).
inline std::pair<double, double> mean_and_variance(const Operator& a, const StateVector& psi) {
    if (a.dim() != psi.dim())
        throw DimensionMismatch("mean_and_variance: operator/state dimension mismatch");
    VectorXc apsi = a.entries * psi.amplitudes;
    double mean = psi.amplitudes.dot(apsi).real();
    double second = apsi.squaredNorm();
    return {mean, second - mean * mean};
}

namespace detail {

inline void check_keep(const std::vector<Index>& dims, const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw BadFactorIndex("partial_trace: empty keep set");
    for (std::size_t f : keep)
        if (f >= dims.size()) throw BadFactorIndex("partial_trace: factor index out of range");
    for (std::size_t i = 1; i < keep.size(); ++i)
        if (keep[i] <= keep[i - 1])
            throw BadFactorIndex("partial_trace: keep set must be strictly increasing");
}

inline std::vector<std::size_t> complement(std::size_t nfactors,
                                           const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> traced;
    for (std::size_t f = 0; f < nfactors; ++f)
        if (!std::binary_search(keep.begin(), keep.end(), f)) traced.push_back(f);
    return traced;
}

}  // namespace detail

/// Trace out every tensor factor not listed in `keep` (sorted, unique).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
    detail::check_keep(rho.dims, keep);
    const auto traced = detail::complement(rho.dims.size(), keep);
    const auto strides = detail::strides(rho.dims);
    const auto ko = detail::subset_offsets(rho.dims, strides, keep);
    const auto to = detail::subset_offsets(rho.dims, strides, traced);

    const Index dk = static_cast<Index>(ko.size());
    MatrixXc out = MatrixXc::Zero(dk, dk);
    for (Index r = 0; r < dk; ++r)
        for (Index c = 0; c < dk; ++c) {
            Complex acc{};
            for (Index b : to) acc += rho.entries(ko[static_cast<std::size_t>(r)] + b,
                                                  ko[static_cast<std::size_t>(c)] + b);
            out(r, c) = acc;
        }
    std::vector<Index> dims;
    for (std::size_t f : keep) dims.push_back(rho.dims[f]);
    return DensityMatrix(std::move(out), std::move(dims));
}

/// Reduced density matrix of a pure state without materializing |psi><psi|.
inline DensityMatrix reduced_density_matrix(const StateVector& psi,
                                            const std::vector<std::size_t>& keep) {
    detail::check_keep(psi.dims, keep);
    const auto traced = detail::complement(psi.dims.size(), keep);
    const auto strides = detail::strides(psi.dims);
    const auto ko = detail::subset_offsets(psi.dims, strides, keep);
    const auto to = detail::subset_offsets(psi.dims, strides, traced);

    const Index dk = static_cast<Index>(ko.size());
    MatrixXc out = MatrixXc::Zero(dk, dk);
    for (Index r = 0; r < dk; ++r)
        for (Index c = 0; c < dk; ++c) {
            Complex acc{};
            for (Index b : to)
                acc += psi.amplitudes(ko[static_cast<std::size_t>(r)] + b) *
                       std::conj(psi.amplitudes(ko[static_cast<std::size_t>(c)] + b));
            out(r, c) = acc;
        }
    std::vector<Index> dims;
    for (std::size_t f : keep) dims.push_back(psi.dims[f]);
    return DensityMatrix(std::move(out), std::move(dims));
}

inline DensityMatrix density_matrix(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint(), psi.dims);
}

/// (1/2) sum |eigenvalues(r1 - r2)|.
inline double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
    if (r1.dim() != r2.dim())
        throw DimensionMismatch("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(r1.entries - r2.entries, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Common operators
// ---------------------------------------------------------------------------

inline Operator identity_op(Index d) {
    return Operator::hermitian_op(MatrixXc::Identity(d, d), {d});
}

inline Operator pauli_x() {
    MatrixXc m(2, 2);
    m << 0, 1, 1, 0;
    return Operator::hermitian_op(std::move(m), {2});
}

inline Operator pauli_y() {
    MatrixXc m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator::hermitian_op(std::move(m), {2});
}

inline Operator pauli_z() {
    MatrixXc m(2, 2);
    m << 1, 0, 0, -1;
    return Operator::hermitian_op(std::move(m), {2});
}

/// Computational basis state |k> in dimension d.
inline StateVector basis_state(Index d, Index k) {
    if (k < 0 || k >= d) throw InvalidSpec("basis_state: index out of range");
    VectorXc v = VectorXc::Zero(d);
    v(k) = 1.0;
    return StateVector(std::move(v), {d});
}

}  // namespace thermolimit
