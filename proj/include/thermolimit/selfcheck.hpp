#pragma once

// Runtime validation suite behind `thermolimit validate`: every module's
// invariants exercised on seeded random inputs, one pass/fail row each.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thermolimit/catdynamics.hpp"
#include "thermolimit/ensemble.hpp"
#include "thermolimit/hilbert.hpp"
#include "thermolimit/regularize.hpp"
#include "thermolimit/strongcoupling.hpp"

namespace thermolimit {

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace selfcheck {

inline std::string num(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

inline MatrixXc random_hermitian(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXc m(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) m(i, j) = Complex(g(rng), g(rng));
    return 0.5 * (m + MatrixXc(m.adjoint()));
}

inline StateVector random_state(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    VectorXc v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return StateVector(v / v.norm(), {dim});
}

inline StateVector plus_state() {
    VectorXc v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(v, {2});
}

inline void hilbert_checks(std::vector<CheckResult>& out, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> time(-4.0, 4.0);

    double worst_norm = 0.0, worst_comp = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        const Index dim = 4 + 4 * (rep % 4);
        Operator h = Operator::hermitian_op(random_hermitian(dim, rng), {dim});
        StateVector psi = random_state(dim, rng);
        const double t1 = time(rng), t2 = time(rng);
        StateVector a = evolve(h, psi, t1);
        worst_norm = std::max(worst_norm, std::abs(a.amplitudes.norm() - 1.0));
        StateVector ab = evolve(h, a, t2);
        StateVector c = evolve(h, psi, t1 + t2);
        worst_comp = std::max(worst_comp, (ab.amplitudes - c.amplitudes).cwiseAbs().maxCoeff());
    }
    out.push_back({"hilbert", "unitarity", worst_norm <= 1e-10,
                   "max |norm-1| = " + num(worst_norm)});
    out.push_back({"hilbert", "evolution-composition", worst_comp <= 1e-9,
                   "max amplitude deviation = " + num(worst_comp)});

    double worst_rec = 0.0;
    for (Index dim : {64, 256}) {
        Operator h = Operator::hermitian_op(random_hermitian(dim, rng), {dim});
        SpectralDecomp d = herm_eigen(h);
        MatrixXc rebuilt = d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.adjoint();
        worst_rec = std::max(worst_rec, (rebuilt - h.entries).cwiseAbs().maxCoeff());
    }
    out.push_back({"hilbert", "spectral-reconstruction", worst_rec <= 1e-10,
                   "max entry error = " + num(worst_rec)});

    double worst_trace = 0.0, worst_eig = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        StateVector psi = random_state(12, rng);
        StateVector shaped(psi.amplitudes, {2, 3, 2});
        DensityMatrix red = reduced_density_matrix(shaped, {static_cast<std::size_t>(rep % 3)});
        worst_trace = std::max(worst_trace, std::abs(red.entries.trace().real() - 1.0));
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(red.entries, Eigen::EigenvaluesOnly);
        worst_eig = std::max(worst_eig, -es.eigenvalues()(0));
    }
    out.push_back({"hilbert", "partial-trace-density", worst_trace <= 1e-10 && worst_eig <= 1e-10,
                   "trace error " + num(worst_trace) + ", min eig " + num(-worst_eig)});
}

inline void ensemble_checks(std::vector<CheckResult>& out, std::mt19937_64& rng) {
    SubsystemSpec tmpl(pauli_z(), pauli_x(), plus_state());

    double worst = 0.0;
    for (long long n : {2LL, 5LL, 8LL}) {
        EnsembleSpec spec = EnsembleSpec::identical(tmpl, n);
        std::vector<double> ts;
        for (int k = 0; k < 16; ++k) ts.push_back(3.0 * k / 15.0);
        auto brute = collective_stats_bruteforce(spec, ts);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            CollectiveStats f = collective_stats_factorized(spec, ts[k]);
            worst = std::max(worst, std::abs(f.mean - brute[k].mean));
            worst = std::max(worst, std::abs(f.variance - brute[k].variance));
        }
    }
    out.push_back({"ensemble", "oracle-equivalence", worst <= 1e-10,
                   "max |factorized - brute| = " + num(worst)});

    CollectiveStats one = collective_stats_factorized(EnsembleSpec::identical(tmpl, 1), 0.4);
    bool extensive = true;
    for (long long n : {10LL, 10000LL, 1000000LL}) {
        CollectiveStats s = collective_stats_factorized(EnsembleSpec::identical(tmpl, n), 0.4);
        extensive = extensive && s.mean == static_cast<double>(n) * one.mean &&
                    s.variance == static_cast<double>(n) * one.variance;
    }
    out.push_back({"ensemble", "extensivity-identity", extensive,
                   "mean(n) = n mean(1), variance(n) = n variance(1) exactly"});

    SubsystemSpec conserved(pauli_x(), pauli_x(), basis_state(2, 0));
    EnsembleSpec cspec = EnsembleSpec::identical(conserved, 5);
    CollectiveStats ref = collective_stats_factorized(cspec, 0.0);
    double drift = 0.0;
    for (double t : {0.7, 2.3, 5.1}) {
        CollectiveStats s = collective_stats_factorized(cspec, t);
        drift = std::max({drift, std::abs(s.mean - ref.mean), std::abs(s.variance - ref.variance)});
    }
    out.push_back({"ensemble", "conservation", drift <= 1e-10, "max drift = " + num(drift)});

    std::vector<SubsystemSpec> subs;
    for (int k = 0; k < 4; ++k)
        subs.push_back(SubsystemSpec(Operator::hermitian_op(random_hermitian(2, rng), {2}),
                                     Operator::hermitian_op(random_hermitian(2, rng), {2}),
                                     random_state(2, rng)));
    CollectiveStats whole = collective_stats_factorized(EnsembleSpec::heterogeneous(subs), 0.8);
    double mean = 0.0, var = 0.0;
    for (const auto& sub : subs) {
        CollectiveStats s = collective_stats_factorized(EnsembleSpec::identical(sub, 1), 0.8);
        mean += s.mean;
        var += s.variance;
    }
    const double add_err = std::max(std::abs(whole.mean - mean), std::abs(whole.variance - var));
    out.push_back({"ensemble", "heterogeneous-additivity", add_err <= 1e-10,
                   "max deviation = " + num(add_err)});
}

inline void strongcoupling_checks(std::vector<CheckResult>& out, std::mt19937_64& rng) {
    Operator h_s = Operator::hermitian_op(random_hermitian(2, rng), {2});
    StateVector psi = random_state(2, rng);

    // dephasing structure of the analytic reduced state
    StrongCouplingModel model(h_s, pauli_x(), 6, std::vector<double>(6, 1.0), 3.0);
    const SpectralDecomp& basis = model.v0_decomp();
    MatrixXc r0 = basis.eigenvectors.adjoint() * analytic_rho_s(model, psi, 0.0).entries *
                  basis.eigenvectors;
    double structure = 0.0;
    for (double t : {0.6, 1.9, 4.2}) {
        MatrixXc r = basis.eigenvectors.adjoint() * analytic_rho_s(model, psi, t).entries *
                     basis.eigenvectors;
        structure = std::max(structure, std::abs(r(0, 0) - r0(0, 0)));
        structure = std::max(structure, std::abs(r(1, 1) - r0(1, 1)));
        structure = std::max(structure, std::abs(std::abs(r(0, 1)) - std::abs(r0(0, 1))));
    }
    out.push_back({"strongcoupling", "dephasing-structure", structure <= 1e-12,
                   "max diagonal/coherence drift = " + num(structure)});

    // commuting exactness
    MatrixXc hz(2, 2);
    hz << 0.5, 0, 0, -0.5;
    double commuting = 0.0;
    for (double g : {1.0, 10.0, 100.0}) {
        StrongCouplingModel cm(Operator::hermitian_op(hz, {2}), pauli_z(), 5,
                               std::vector<double>(5, 1.0), g);
        for (double t : {0.3, 1.1}) {
            commuting = std::max(
                commuting, trace_distance(exact_rho_s(cm, plus_state(), t),
                                          analytic_rho_s(cm, plus_state(), t)));
        }
    }
    out.push_back({"strongcoupling", "commuting-exactness", commuting <= 1e-10,
                   "max trace distance = " + num(commuting)});

    // strong-coupling convergence along the g ladder
    std::vector<double> ts;
    for (int k = 0; k < 16; ++k) ts.push_back(0.5 * k / 15.0);
    std::vector<double> maxima;
    for (double g : {5.0, 20.0, 80.0}) {
        StrongCouplingModel nm(Operator::hermitian_op(hz, {2}), pauli_x(), 4,
                               std::vector<double>(4, 1.0), g);
        auto exact = exact_rho_s(nm, plus_state(), ts);
        double worst = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k)
            worst = std::max(worst,
                             trace_distance(exact[k], analytic_rho_s(nm, plus_state(), ts[k])));
        maxima.push_back(worst);
    }
    const bool ladder = maxima[1] <= maxima[0] && maxima[2] <= maxima[1];
    out.push_back({"strongcoupling", "strong-coupling-convergence", ladder,
                   "max distances " + num(maxima[0]) + " -> " + num(maxima[1]) + " -> " +
                       num(maxima[2])});

    // averaging bound on one coherence
    StrongCouplingModel am(Operator::hermitian_op(hz, {2}), pauli_x(), 4,
                           std::vector<double>(4, 1.0), 10.0);
    const double window = 50.0 * tau_m(am);
    const std::size_t samples = 8001;
    std::vector<DensityMatrix> series;
    series.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i)
        series.push_back(analytic_rho_s(am, basis_state(2, 0),
                                        window * static_cast<double>(i) /
                                            static_cast<double>(samples - 1)));
    DensityMatrix avg = time_averaged_rho(series);
    const SpectralDecomp& ab = am.v0_decomp();
    MatrixXc avg_v = ab.eigenvectors.adjoint() * avg.entries * ab.eigenvectors;
    const double omega_min = std::abs(am.phase_rate(1, 0));
    const double h = window / static_cast<double>(samples - 1);
    const double bound =
        0.5 * (2.0 / (omega_min * window) + h * h * omega_min * omega_min / 12.0);
    const bool avg_ok = std::abs(avg_v(0, 1)) <= bound;
    out.push_back({"strongcoupling", "averaging-bound", avg_ok,
                   "|avg coherence| = " + num(std::abs(avg_v(0, 1))) + " <= " + num(bound)});

    // with h_bath = 0 the bath reduced state never moves
    auto prop = detail::assemble_exact(am, plus_state());
    StateVector full_t = evolve(prop.decomp, prop.psi0, 0.8);
    DensityMatrix bath = reduced_density_matrix(full_t, {1});
    const double bath_err = std::abs(bath.entries(0, 0).real() - 1.0);
    out.push_back({"strongcoupling", "bath-invariance", bath_err <= 1e-10,
                   "initial-state weight deviation = " + num(bath_err)});
}

inline void catdynamics_checks(std::vector<CheckResult>& out) {
    double worst_overlap = 1.0, worst_norm = 0.0;
    for (long long n : {1LL, 2LL, 4LL, 8LL}) {
        const double beta_max = 2.0 * 0.1 * static_cast<double>(n);
        CatModel model(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, n, 1.0,
                       adequate_cutoff(beta_max + 1.0));
        std::vector<double> ts;
        for (int k = 0; k < 16; ++k) ts.push_back(4.0 * M_PI * k / 15.0);
        auto brute = brute_force_evolve(model, ts);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            CatEvolution ev = analytic_evolve(model, ts[k]);
            worst_overlap =
                std::min(worst_overlap, std::abs(ev.state.amplitudes.dot(brute[k].amplitudes)));
            worst_norm = std::max(worst_norm, std::abs(ev.raw_norm - 1.0));
        }
    }
    out.push_back({"catdynamics", "analytic-brute-fidelity", worst_overlap >= 1.0 - 1e-6,
                   "min overlap = 1 - " + num(1.0 - worst_overlap)});
    out.push_back({"catdynamics", "norm-preservation", worst_norm <= 1e-9,
                   "max |raw norm - 1| = " + num(worst_norm)});

    FockState cat = cat_state(1.2, 0.9, 40);
    FockState phased(std::exp(Complex(0.0, 1.1)) * cat.amplitudes, 40);
    WignerGrid wa = wigner(cat, {-2.0, 2.0, -2.0, 2.0, 9, 9});
    WignerGrid wb = wigner(phased, {-2.0, 2.0, -2.0, 2.0, 9, 9});
    const double phase_dev = (wa.values - wb.values).cwiseAbs().maxCoeff();
    out.push_back({"catdynamics", "wigner-global-phase", phase_dev <= 1e-12,
                   "max |W difference| = " + num(phase_dev)});

    FockState vac = coherent_state(0.0, 60);
    WignerGrid peak = wigner(vac, {-0.05, 0.05, -0.05, 0.05, 3, 3});
    WignerGrid norm_grid = wigner(vac, {-4.0, 4.0, -4.0, 4.0, 81, 81});
    const double cell = (norm_grid.x_axis[1] - norm_grid.x_axis[0]) *
                        (norm_grid.p_axis[1] - norm_grid.p_axis[0]);
    const double peak_err = std::abs(peak.values(1, 1) - 1.0 / M_PI);
    const double norm_err = std::abs(norm_grid.values.sum() * cell - 1.0);
    out.push_back({"catdynamics", "wigner-reference-values",
                   peak_err <= 1e-6 && norm_err <= 1e-3,
                   "vacuum peak error " + num(peak_err) + ", normalization error " +
                       num(norm_err)});

    bool homogeneous = true;
    for (long long n : {10LL, 20LL}) {
        auto make = [](long long nn) {
            return CatModel(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, nn, 1.0,
                            adequate_cutoff(0.2 * static_cast<double>(nn) + 1.0));
        };
        InterferenceMetrics a = interference_metrics(make(n), 1.0);
        InterferenceMetrics b = interference_metrics(make(2 * n), 1.0);
        homogeneous = homogeneous &&
                      std::abs(b.phase_gap - 2.0 * a.phase_gap) <= 1e-12 * b.phase_gap &&
                      std::abs(b.separation_ratio - 0.5 * a.separation_ratio) <=
                          1e-12 * a.separation_ratio;
    }
    out.push_back({"catdynamics", "n-homogeneity", homogeneous,
                   "phase_gap doubles and separation_ratio halves with N"});
}

inline void regularize_checks(std::vector<CheckResult>& out) {
    double worst = 0.0;
    bool bound_ok = true;
    for (double f : {0.2, 0.9, 1.7, 2.8, 4.9})
        for (std::size_t m : {100UL, 10000UL, 1000000UL}) {
            auto r = cesaro_mean({f, m, 0.5});
            const double closed = std::sin(0.5 * static_cast<double>(m) * f) *
                                  std::cos(0.5 * (static_cast<double>(m) + 1.0) * f) /
                                  (static_cast<double>(m) * std::sin(0.5 * f));
            worst = std::max(worst, std::abs(r.value - closed));
            bound_ok = bound_ok && std::abs(r.value) <=
                                       1.0 / (static_cast<double>(m) * std::abs(std::sin(0.5 * f))) +
                                           1e-12;
        }
    out.push_back({"regularize", "cesaro-dirichlet-bound", worst <= 1e-10 && bound_ok,
                   "max closed-form deviation = " + num(worst)});

    bool abel_ok = true;
    for (double f : {0.5, 1.5, 3.0})
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            auto a = abel_mean({f, 1, 1.0 - eps});
            abel_ok = abel_ok && std::abs(a.value) <= 2.0 * eps / (1.0 - std::cos(f));
        }
    out.push_back({"regularize", "abel-linear-decay", abel_ok,
                   "|abel| <= 2 eps / (1 - cos f) across the grid"});

    bool window_ok = true;
    for (double omega : {9.0, 40.0, 150.0}) {
        const double t_max = 5.0;
        const std::size_t count = 4001;
        std::vector<Complex> s(count);
        for (std::size_t i = 0; i < count; ++i)
            s[i] = std::exp(Complex(0.0, omega * t_max * static_cast<double>(i) /
                                             static_cast<double>(count - 1)));
        const double h = t_max / static_cast<double>(count - 1);
        window_ok = window_ok && std::abs(window_average(s)) <=
                                     2.0 / (omega * t_max) + h * h * omega * omega / 12.0;
    }
    out.push_back({"regularize", "window-trapezoid-bound", window_ok,
                   "|avg| <= 2/(omega T) + h^2 omega^2 / 12 across the grid"});
}

}  // namespace selfcheck

/// Every module's invariant suite on seeded inputs.
inline std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CheckResult> out;
    selfcheck::hilbert_checks(out, rng);
    selfcheck::ensemble_checks(out, rng);
    selfcheck::strongcoupling_checks(out, rng);
    selfcheck::catdynamics_checks(out);
    selfcheck::regularize_checks(out);
    return out;
}

}  // namespace thermolimit
