#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "thermolimit/ensemble.hpp"

using namespace thermolimit;
using Catch::Approx;
using testsupport::random_hermitian;
using testsupport::random_state;

namespace {

StateVector plus_state() {
    VectorXc v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(v, {2});
}

SubsystemSpec tilted_qubit() {
    // Non-eigenstate preparation: mean cos(2t), variance sin^2(2t) per qubit.
    return SubsystemSpec(pauli_z(), pauli_x(), plus_state());
}

SubsystemSpec random_subsystem(Index dim, std::mt19937_64& rng) {
    return SubsystemSpec(Operator::hermitian_op(random_hermitian(dim, rng), {dim}),
                         Operator::hermitian_op(random_hermitian(dim, rng), {dim}),
                         StateVector(random_state(dim, rng), {dim}));
}

}  // namespace

TEST_CASE("factorized stats") {
    SECTION("conserved observable on its eigenstate: mean N, variance 0") {
        SubsystemSpec sub(pauli_z(), pauli_z(), basis_state(2, 0));
        for (double t : {0.0, 0.7, 3.1}) {
            CollectiveStats s = collective_stats_factorized(EnsembleSpec::identical(sub, 10), t);
            REQUIRE(s.mean == Approx(10.0).margin(1e-12));
            REQUIRE(s.variance == Approx(0.0).margin(1e-12));
        }
    }

    SECTION("rotating qubit: mean N cos 2t, variance N sin^2 2t") {
        // Heisenberg oracle: sigma_x(t) = sigma_x cos 2t - sigma_y sin 2t on |+>.
        EnsembleSpec spec = EnsembleSpec::identical(tilted_qubit(), 4);
        CollectiveStats s = collective_stats_factorized(spec, M_PI / 4.0);
        REQUIRE(s.mean == Approx(0.0).margin(1e-12));
        REQUIRE(s.variance == Approx(4.0).epsilon(1e-12));

        CollectiveStats s2 = collective_stats_factorized(spec, 0.4);
        REQUIRE(s2.mean == Approx(4.0 * std::cos(0.8)).epsilon(1e-12));
        REQUIRE(s2.variance == Approx(4.0 * std::sin(0.8) * std::sin(0.8)).epsilon(1e-12));
    }

    SECTION("N = 1 reduces to single-subsystem expectation and variance") {
        std::mt19937_64 rng(5);
        SubsystemSpec sub = random_subsystem(3, rng);
        CollectiveStats s =
            collective_stats_factorized(EnsembleSpec::identical(sub, 1), 0.9);
        StateVector psi_t = evolve(sub.h, sub.psi0, 0.9);
        auto [m, v] = mean_and_variance(sub.a, psi_t);
        REQUIRE(s.mean == Approx(m).margin(1e-14));
        REQUIRE(s.variance == Approx(v).margin(1e-14));
    }

    SECTION("extensivity is a floating-point identity for identical replication") {
        CollectiveStats one = collective_stats_factorized(
            EnsembleSpec::identical(tilted_qubit(), 1), 0.4);
        for (long long n : {7LL, 1000LL, 1000000LL}) {
            CollectiveStats s = collective_stats_factorized(
                EnsembleSpec::identical(tilted_qubit(), n), 0.4);
            REQUIRE(s.mean == static_cast<double>(n) * one.mean);
            REQUIRE(s.variance == static_cast<double>(n) * one.variance);
            REQUIRE(s.mean_per == one.mean);
        }
    }
}

TEST_CASE("brute force oracle") {
    SECTION("zero Hamiltonian, conserved sigma_z") {
        SubsystemSpec sub(Operator::hermitian_op(MatrixXc::Zero(2, 2), {2}), pauli_z(),
                          basis_state(2, 0));
        CollectiveStats s = collective_stats_bruteforce(EnsembleSpec::identical(sub, 2), 1.7);
        REQUIRE(s.mean == Approx(2.0).margin(1e-12));
        REQUIRE(s.variance == Approx(0.0).margin(1e-12));
    }

    SECTION("agreement with the factorized path, identical qubits") {
        EnsembleSpec spec = EnsembleSpec::identical(tilted_qubit(), 6);
        for (double t : {0.0, 0.3, 1.1, 2.9}) {
            CollectiveStats f = collective_stats_factorized(spec, t);
            CollectiveStats b = collective_stats_bruteforce(spec, t);
            REQUIRE(b.mean == Approx(f.mean).margin(1e-10));
            REQUIRE(b.variance == Approx(f.variance).margin(1e-10));
        }
    }

    SECTION("agreement on heterogeneous mixed dimensions") {
        std::mt19937_64 rng(37);
        std::vector<SubsystemSpec> subs;
        subs.push_back(random_subsystem(2, rng));
        subs.push_back(random_subsystem(3, rng));
        subs.push_back(random_subsystem(4, rng));
        EnsembleSpec spec = EnsembleSpec::heterogeneous(subs);
        std::vector<double> ts{0.0, 0.5, 1.3};
        auto brute = collective_stats_bruteforce(spec, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CollectiveStats f = collective_stats_factorized(spec, ts[i]);
            REQUIRE(brute[i].mean == Approx(f.mean).margin(1e-10));
            REQUIRE(brute[i].variance == Approx(f.variance).margin(1e-10));
        }
    }

    SECTION("cap behavior at 13 qubits") {
        REQUIRE_THROWS_AS(
            collective_stats_bruteforce(EnsembleSpec::identical(tilted_qubit(), 13), 0.1),
            TooLarge);
    }
}

TEST_CASE("heterogeneous additivity") {
    std::mt19937_64 rng(41);
    std::vector<SubsystemSpec> subs;
    for (int k = 0; k < 4; ++k) subs.push_back(random_subsystem(2, rng));
    CollectiveStats whole =
        collective_stats_factorized(EnsembleSpec::heterogeneous(subs), 0.8);
    double mean = 0.0, variance = 0.0;
    for (const auto& sub : subs) {
        CollectiveStats s =
            collective_stats_factorized(EnsembleSpec::identical(sub, 1), 0.8);
        mean += s.mean;
        variance += s.variance;
    }
    REQUIRE(whole.mean == Approx(mean).margin(1e-10));
    REQUIRE(whole.variance == Approx(variance).margin(1e-10));
}

TEST_CASE("conserved families are time independent") {
    // [A, H] = 0 with A = H = sigma_x, non-eigenstate preparation |0>.
    SubsystemSpec sub(pauli_x(), pauli_x(), basis_state(2, 0));
    EnsembleSpec spec = EnsembleSpec::identical(sub, 5);
    CollectiveStats ref = collective_stats_factorized(spec, 0.0);
    for (double t : {0.4, 1.9, 6.0}) {
        CollectiveStats s = collective_stats_factorized(spec, t);
        REQUIRE(s.mean == Approx(ref.mean).margin(1e-10));
        REQUIRE(s.variance == Approx(ref.variance).margin(1e-10));
    }
}

TEST_CASE("scaling study") {
    std::vector<long long> ns{1, 10, 100, 1000, 10000, 100000, 1000000};

    SECTION("slopes are exactly +1/2 and -1/2") {
        // Var(n) = n Var(1) exactly, so the log-log fit is an algebraic identity.
        VectorXc v(2);
        v << std::cos(M_PI / 8.0), std::sin(M_PI / 8.0);
        SubsystemSpec tmpl(pauli_z(), pauli_x(), StateVector(v, {2}));
        ScalingStudy study = scaling_study(tmpl, ns, 0.3);
        REQUIRE(study.rows.size() == ns.size());
        REQUIRE(study.slope_sqrt_variance == Approx(0.5).margin(1e-12));
        REQUIRE(study.slope_ratio.has_value());
        REQUIRE(*study.slope_ratio == Approx(-0.5).margin(1e-12));
    }

    SECTION("eigenstate template is rejected") {
        SubsystemSpec tmpl(pauli_z(), pauli_z(), basis_state(2, 0));
        REQUIRE_THROWS_AS(scaling_study(tmpl, ns, 0.3), DegenerateVariance);
    }
}
