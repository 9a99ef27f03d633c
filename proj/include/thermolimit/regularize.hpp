#pragma once

// Regularized means of oscillatory sequences: Cesaro and Abel summation of
// cos(N f), and finite-window trapezoidal time averages. These are the
// quantitative backing for "interference terms average away".

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "thermolimit/errors.hpp"

namespace thermolimit {

// f with |sin(f/2)| at or below this is treated as resonant (f = 0 mod 2pi):
// the sequence cos(Nf) is constant 1 and no averaging can suppress it.
inline constexpr double kResonantTol = 1e-12;

struct OscillatorySpec {
    double f = 0.0;        // phase increment of cos(N f)
    std::size_t m = 1;     // Cesaro truncation M
    double r = 0.5;        // Abel parameter, strictly inside (0,1)

    void validate() const {
        if (m < 1) throw InvalidSpec("OscillatorySpec: m must be >= 1");
        if (!(r > 0.0 && r < 1.0)) throw InvalidSpec("OscillatorySpec: r must lie in (0,1)");
    }

    bool resonant() const { return std::abs(std::sin(f / 2.0)) <= kResonantTol; }
};

/// Mean value plus a flag marking the resonant (non-decohering) phase.
struct RegularizedMean {
    double value = 0.0;
    bool resonant = false;
};

/// (1/M) sum_{N=1}^{M} cos(N f), summed compensated so the closed-form
/// comparison stays meaningful at M up to 1e6.
inline RegularizedMean cesaro_mean(const OscillatorySpec& spec) {
    spec.validate();
    if (spec.resonant()) return {1.0, true};
    double sum = 0.0, carry = 0.0;  // Kahan
    for (std::size_t n = 1; n <= spec.m; ++n) {
        double term = std::cos(static_cast<double>(n) * spec.f) - carry;
        double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return {sum / static_cast<double>(spec.m), false};
}

/// (1-r) sum_{N>=1} r^N cos(N f) in closed form; the resonant limit is 1.
inline RegularizedMean abel_mean(const OscillatorySpec& spec) {
    spec.validate();
    if (spec.resonant()) return {1.0, true};
    const double r = spec.r, c = std::cos(spec.f);
    double value = (1.0 - r) * (r * c - r * r) / (1.0 - 2.0 * r * c + r * r);
    return {value, false};
}

/// Trapezoidal mean of uniformly spaced samples over [0, T].
inline std::complex<double> window_average(const std::vector<std::complex<double>>& samples) {
    if (samples.size() < 2) throw EmptySeries("window_average: need at least 2 samples");
    std::complex<double> acc = 0.5 * (samples.front() + samples.back());
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) acc += samples[i];
    return acc / static_cast<double>(samples.size() - 1);
}

}  // namespace thermolimit
