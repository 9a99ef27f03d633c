#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "thermolimit/catdynamics.hpp"

using namespace thermolimit;
using Catch::Approx;

namespace {

// ---------------------------------------------------------------------------
// Closed-form ideal-cat Wigner oracle, independent of the truncated-basis
// displaced-parity implementation. For rho = |c1><c2| the Weyl transform is
//   W12(l) = (1/pi) e^{-2i Im(l c1*)} exp(-|c2|^2/2 - |2l - c1|^2/2 + c2* (2l - c1))
// and a cat is the Hermitian combination of four such pieces.
// ---------------------------------------------------------------------------

std::complex<double> cross_wigner(std::complex<double> c1, std::complex<double> c2,
                                  std::complex<double> l) {
    const std::complex<double> i{0.0, 1.0};
    const std::complex<double> shifted = 2.0 * l - c1;
    const double phase = -2.0 * (l * std::conj(c1)).imag();
    return std::exp(i * phase) *
           std::exp(-0.5 * std::norm(c2) - 0.5 * std::norm(shifted) + std::conj(c2) * shifted) /
           M_PI;
}

double ideal_cat_wigner(double alpha, double phi, std::complex<double> l) {
    const std::complex<double> i{0.0, 1.0};
    const std::complex<double> c1 = alpha * std::exp(i * phi);
    const std::complex<double> c2 = alpha * std::exp(-i * phi);
    const double overlap =
        std::exp(-0.5 * std::norm(c1) - 0.5 * std::norm(c2) + (std::conj(c1) * c2).real()) *
        std::cos((std::conj(c1) * c2).imag());
    const double norm_sq = 2.0 + 2.0 * overlap;
    const double w11 = cross_wigner(c1, c1, l).real();
    const double w22 = cross_wigner(c2, c2, l).real();
    const double w12 = cross_wigner(c1, c2, l).real();
    return (w11 + w22 + 2.0 * w12) / norm_sq;
}

double fock_mean_n(const FockState& s) {
    double acc = 0.0;
    for (Index n = 0; n <= s.cutoff; ++n) acc += static_cast<double>(n) * std::norm(s.amplitudes(n));
    return acc;
}

Complex overlap(const FockState& a, const FockState& b) {
    return a.amplitudes.dot(b.amplitudes);
}

}  // namespace

TEST_CASE("coherent_state") {
    SECTION("alpha = 0 is the vacuum") {
        FockState s = coherent_state(0.0, 16);
        REQUIRE(std::abs(s.amplitudes(0) - 1.0) < 1e-14);
        REQUIRE(s.amplitudes.tail(16).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("Poisson mean |alpha|^2") {
        FockState s = coherent_state(2.0, 40);
        REQUIRE(fock_mean_n(s) == Approx(4.0).margin(1e-8));
    }

    SECTION("pairwise overlap matches exp(-|a-b|^2/2)") {
        for (auto [a, b] : std::vector<std::pair<Complex, Complex>>{
                 {Complex(1.0, 0.0), Complex(0.0, 1.0)},
                 {Complex(0.5, 0.5), Complex(-0.3, 0.8)},
                 {Complex(2.0, 0.0), Complex(1.0, 1.0)}}) {
            FockState sa = coherent_state(a, 48), sb = coherent_state(b, 48);
            REQUIRE(std::abs(overlap(sa, sb)) ==
                    Approx(std::exp(-0.5 * std::norm(a - b))).margin(1e-8));
        }
    }

    SECTION("inadequate cutoff is rejected") {
        REQUIRE_THROWS_AS(coherent_state(4.0, 12), InadequateCutoff);
    }
}

TEST_CASE("displacement_apply") {
    SECTION("defining property: displaced vacuum is coherent") {
        FockState vac = coherent_state(0.0, 32);
        for (Complex beta : {Complex(1.2, 0.0), Complex(0.4, -0.9), Complex(0.0, 2.0)}) {
            FockState d = displacement_apply(beta, vac);
            FockState c = coherent_state(beta, 32);
            REQUIRE(std::abs(overlap(d, c)) == Approx(1.0).margin(1e-8));
        }
    }

    SECTION("zero displacement is the identity") {
        FockState s = coherent_state(Complex(0.8, 0.3), 32);
        FockState d = displacement_apply(0.0, s);
        REQUIRE((d.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("opposite displacements cancel without residual phase") {
        FockState s = coherent_state(Complex(0.5, 0.2), 40);
        Complex beta(0.9, -0.4);
        FockState back = displacement_apply(-beta, displacement_apply(beta, s));
        REQUIRE((back.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("cat_state") {
    SECTION("phi = 0 degenerates to a single coherent branch") {
        FockState cat = cat_state(1.5, 0.0, 32);
        FockState coh = coherent_state(1.5, 32);
        REQUIRE(std::abs(overlap(cat, coh)) == Approx(1.0).margin(1e-12));
    }

    SECTION("alpha = 0 is the vacuum for any phi") {
        FockState cat = cat_state(0.0, 1.1, 16);
        REQUIRE(std::abs(cat.amplitudes(0)) == Approx(1.0).margin(1e-12));
    }

    SECTION("even cat of |±2i>: only even levels, parity exactly 1") {
        FockState cat = cat_state(2.0, M_PI / 2.0, 40);
        REQUIRE(std::abs(cat.amplitudes.norm() - 1.0) < 1e-10);
        double parity = 0.0;
        for (Index n = 0; n <= cat.cutoff; ++n) {
            if (n % 2 == 1) REQUIRE(std::abs(cat.amplitudes(n)) < 1e-12);
            parity += ((n % 2 == 0) ? 1.0 : -1.0) * std::norm(cat.amplitudes(n));
        }
        REQUIRE(parity == Approx(1.0).margin(1e-10));

        // normalization factor against the closed-form branch overlap
        const double alpha = 2.0;
        const double expected_norm_sq = 2.0 + 2.0 * std::exp(-2.0 * alpha * alpha);
        VectorXc raw = detail::coherent_amplitudes(Complex(0.0, alpha), 40) +
                       detail::coherent_amplitudes(Complex(0.0, -alpha), 40);
        REQUIRE(raw.squaredNorm() == Approx(expected_norm_sq).margin(1e-8));
    }
}

TEST_CASE("analytic_evolve") {
    CatModel model(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, 4, 1.0, 40);

    SECTION("t = 0 reproduces the initial cat with zero phases") {
        CatEvolution ev = analytic_evolve(model, 0.0);
        REQUIRE(ev.xi == 0.0);
        REQUIRE(std::abs(ev.beta_t) == 0.0);
        REQUIRE(ev.phi1 == 0.0);
        REQUIRE(ev.phi2 == 0.0);
        FockState cat = cat_state(model.alpha, model.phi, model.cutoff);
        REQUIRE(std::abs(overlap(ev.state, cat)) == Approx(1.0).margin(1e-12));
    }

    SECTION("decoupled limit: freely rotating cat") {
        CatModel free(1.0, Complex(0.0, 0.0), 1.0, M_PI / 4.0, 4, 1.0, 20);
        const double t = 0.8;
        CatEvolution ev = analytic_evolve(free, t);
        REQUIRE(ev.xi == 0.0);
        REQUIRE(ev.phi1 == 0.0);
        REQUIRE(ev.phi2 == 0.0);
        // branches alpha e^{±i phi - i omega t}: a rotated cat
        VectorXc expect =
            detail::coherent_amplitudes(1.0 * std::exp(Complex(0.0, M_PI / 4.0 - t)), 20) +
            detail::coherent_amplitudes(1.0 * std::exp(Complex(0.0, -M_PI / 4.0 - t)), 20);
        expect /= expect.norm();
        REQUIRE(std::abs(ev.state.amplitudes.dot(expect)) == Approx(1.0).margin(1e-10));
    }

    SECTION("full period: beta returns to zero, xi advances by 2 pi (N abar gamma/omega)^2") {
        const double t = 2.0 * M_PI;
        CatEvolution ev = analytic_evolve(model, t);
        REQUIRE(std::abs(ev.beta_t) < 1e-12);
        REQUIRE(ev.xi == Approx(2.0 * M_PI * 16.0 * 0.01).epsilon(1e-12));
        FockState cat = cat_state(model.alpha, model.phi, model.cutoff);
        REQUIRE(std::abs(overlap(ev.state, cat)) == Approx(1.0).margin(1e-8));
    }

    SECTION("norm of the displayed formula stays 1 within 1e-9") {
        for (double t : {0.0, 0.5, 1.7, 3.9, 6.1}) {
            CatEvolution ev = analytic_evolve(model, t);
            REQUIRE(std::abs(ev.raw_norm - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("brute force agreement") {
    SECTION("core validation: fidelity at least 1 - 1e-6 over the sweep") {
        for (long long n : {1LL, 2LL, 4LL, 8LL}) {
            const Index cutoff =
                std::max<Index>(adequate_cutoff(2.0 * 0.1 * static_cast<double>(n) + 1.0), 16);
            CatModel model(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, n, 1.0, cutoff);
            std::vector<double> ts;
            for (int k = 0; k < 16; ++k)
                ts.push_back(4.0 * M_PI * static_cast<double>(k) / 15.0);
            auto brute = brute_force_evolve(model, ts);
            for (std::size_t k = 0; k < ts.size(); ++k) {
                CatEvolution ev = analytic_evolve(model, ts[k]);
                REQUIRE(std::abs(overlap(ev.state, brute[k])) >= 1.0 - 1e-6);
            }
        }
    }

    SECTION("t = 0 returns the initial cat") {
        CatModel model(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, 2, 1.0, 24);
        FockState s = brute_force_evolve(model, 0.0);
        FockState cat = cat_state(model.alpha, model.phi, model.cutoff);
        REQUIRE(std::abs(overlap(s, cat)) == Approx(1.0).margin(1e-12));
    }

    SECTION("gamma = 0 on a number state: pure phase, populations frozen") {
        CatModel model(1.0, Complex(0.0, 0.0), 1.0, 0.0, 1, 1.0, 16);
        auto decomp = detail::cat_hamiltonian_decomp(model);
        StateVector one = basis_state(17, 1);
        StateVector out = evolve(decomp, one, 1.3);
        REQUIRE(std::abs(out.amplitudes(1) - std::exp(Complex(0.0, -1.3))) < 1e-12);
        REQUIRE(std::abs(out.amplitudes(0)) < 1e-14);
    }

    SECTION("cutoff cap") {
        REQUIRE_THROWS_AS(
            brute_force_evolve(CatModel(1.0, Complex(0.0, 0.0), 1.0, 0.1, 1, 1.0, 600), 0.1),
            TooLarge);
    }
}

TEST_CASE("wigner function") {
    SECTION("vacuum peak at 1/pi") {
        FockState vac = coherent_state(0.0, 24);
        WignerGrid g = wigner(vac, {-0.1, 0.1, -0.1, 0.1, 3, 3});
        REQUIRE(g.values(1, 1) == Approx(1.0 / M_PI).margin(1e-6));
    }

    SECTION("coherent state: same peak, displaced to (sqrt(2) alpha, 0)") {
        FockState coh = coherent_state(1.5, 32);
        const double x0 = std::sqrt(2.0) * 1.5;
        WignerGrid g = wigner(coh, {x0 - 0.1, x0 + 0.1, -0.1, 0.1, 3, 3});
        REQUIRE(g.values(1, 1) == Approx(1.0 / M_PI).margin(1e-6));
    }

    SECTION("grid normalization over >= 5 sigma") {
        // Corner displacements reach <n> = 16, so the truncation needs room
        // beyond the state itself.
        FockState vac = coherent_state(0.0, 60);
        WignerGrid g = wigner(vac, {-4.0, 4.0, -4.0, 4.0, 81, 81});
        const double dx = g.x_axis[1] - g.x_axis[0];
        const double dp = g.p_axis[1] - g.p_axis[0];
        REQUIRE(g.values.sum() * dx * dp == Approx(1.0).margin(1e-3));
    }

    SECTION("displaced states beyond the truncation are rejected") {
        FockState vac = coherent_state(0.0, 12);
        REQUIRE_THROWS_AS(wigner(vac, {-6.0, 6.0, -6.0, 6.0, 5, 5}), InadequateCutoff);
    }

    SECTION("global phase invariance") {
        FockState cat = cat_state(1.2, 0.9, 40);
        FockState phased(std::exp(Complex(0.0, 0.77)) * cat.amplitudes, 40);
        WignerGrid a = wigner(cat, {-2.0, 2.0, -2.0, 2.0, 11, 11});
        WignerGrid b = wigner(phased, {-2.0, 2.0, -2.0, 2.0, 11, 11});
        REQUIRE((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("cat fringes match the closed-form oracle within 2% of peak") {
        const double alpha = 2.0, phi = M_PI / 2.0;
        FockState cat = cat_state(alpha, phi, 40);
        // Lobes sit at ±2i in the alpha plane; fringes run along the x axis.
        const double peak = std::abs(ideal_cat_wigner(alpha, phi, {0.0, 0.0}));
        WignerGrid g = wigner(cat, {-3.0, 3.0, 0.0, 1e-9, 121, 2});
        for (Index i = 0; i < 121; ++i) {
            const std::complex<double> l{g.x_axis[static_cast<std::size_t>(i)] / std::sqrt(2.0),
                                         0.0};
            REQUIRE(std::abs(g.values(i, 0) - ideal_cat_wigner(alpha, phi, l)) <= 0.02 * peak);
        }
    }
}

TEST_CASE("interference metrics") {
    const double t = 1.0;

    SECTION("exact N homogeneity of phase gap and separation ratio") {
        auto make = [](long long n) {
            const Index cutoff = adequate_cutoff(2.0 * 0.1 * static_cast<double>(n) + 1.0);
            return CatModel(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, n, 1.0, cutoff);
        };
        for (long long n : {10LL, 20LL}) {
            InterferenceMetrics a = interference_metrics(make(n), t);
            InterferenceMetrics b = interference_metrics(make(2 * n), t);
            REQUIRE(b.phase_gap == Approx(2.0 * a.phase_gap).epsilon(1e-12));
            REQUIRE(b.separation_ratio == Approx(0.5 * a.separation_ratio).epsilon(1e-12));
        }
    }

    SECTION("visibility of the t = 0 cat against the closed-form oracle") {
        CatModel model(1.0, Complex(0.1, 0.0), 2.0, M_PI / 2.0, 1, 1.0, 40);
        InterferenceMetrics m = interference_metrics(model, 0.0);
        // Oracle: same midline/lobe procedure on the ideal-cat closed form.
        const std::complex<double> i{0.0, 1.0};
        const std::complex<double> b1 = 2.0 * std::exp(i * (M_PI / 2.0));
        const std::complex<double> b2 = 2.0 * std::exp(-i * (M_PI / 2.0));
        const std::complex<double> mid = 0.5 * (b1 + b2);
        const std::complex<double> dir = i * (b1 - b2) / std::abs(b1 - b2);
        double fringe = 0.0;
        const double half_window = std::min(1.5 * M_PI / std::abs(b1 - b2), 2.0);
        for (int k = 0; k < 257; ++k) {
            double s = -half_window + 2.0 * half_window * k / 256.0;
            fringe = std::max(fringe, std::abs(ideal_cat_wigner(2.0, M_PI / 2.0, mid + s * dir)));
        }
        const double lobe = std::max(ideal_cat_wigner(2.0, M_PI / 2.0, b1),
                                     ideal_cat_wigner(2.0, M_PI / 2.0, b2));
        REQUIRE(m.fringe_visibility == Approx(fringe / lobe).epsilon(0.02));
    }

    SECTION("separation ratio is infinite when beta vanishes") {
        CatModel model(1.0, Complex(0.1, 0.0), 1.0, M_PI / 4.0, 4, 1.0, 40);
        InterferenceMetrics m = interference_metrics(model, 2.0 * M_PI);
        REQUIRE(std::isinf(m.separation_ratio));
    }
}
