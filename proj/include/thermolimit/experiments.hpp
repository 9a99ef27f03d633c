#pragma once

// Experiment orchestration: each experiment produces its data table plus a
// verdict table, all stamped with the config echo. Computation happens fully
// before any file is written.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "thermolimit/catdynamics.hpp"
#include "thermolimit/config.hpp"
#include "thermolimit/ensemble.hpp"
#include "thermolimit/io.hpp"
#include "thermolimit/regularize.hpp"
#include "thermolimit/selfcheck.hpp"
#include "thermolimit/strongcoupling.hpp"
#include "thermolimit/version.hpp"

namespace thermolimit {

struct RunResult {
    bool all_passed = true;
    std::vector<std::filesystem::path> files;
};

namespace detail {

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline ResultTable make_table(const ExperimentConfig& cfg, const std::string& stage,
                              std::vector<Column> columns) {
    ResultTable t;
    t.name = experiment_name(cfg.experiment) + "-" + stage;
    t.columns = std::move(columns);
    t.config_echo = cfg.raw_text;
    t.version = kVersion;
    t.wall_clock = timestamp_utc();
    return t;
}

inline ResultTable make_verdicts(const ExperimentConfig& cfg) {
    return make_table(cfg, "verdicts",
                      {{"check", ColumnType::Text},
                       {"pass", ColumnType::Integer},
                       {"detail", ColumnType::Text}});
}

inline void add_verdict(ResultTable& verdicts, bool& all_passed, const std::string& check,
                        bool pass, const std::string& detail) {
    verdicts.push_row({check, static_cast<long long>(pass ? 1 : 0), detail});
    all_passed = all_passed && pass;
}

inline std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

// ---------------------------------------------------------------------------

inline RunResult run_theorem1(const ExperimentConfig& cfg) {
    const auto& p = std::get<Theorem1Params>(cfg.params);
    ScalingStudy study = scaling_study(p.tmpl, p.n_values, p.t);

    ResultTable table = make_table(cfg, "study",
                                   {{"n", ColumnType::Integer},
                                    {"mean", ColumnType::Real},
                                    {"sqrt_variance", ColumnType::Real},
                                    {"ratio", ColumnType::Real},
                                    {"slope_sqrt_variance", ColumnType::Real},
                                    {"slope_ratio", ColumnType::Real}});
    const double slope_ratio =
        study.slope_ratio ? *study.slope_ratio : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const ScalingRow& r = study.rows[i];
        table.push_row({p.n_values[i], r.mean, r.sqrt_variance, r.ratio,
                        study.slope_sqrt_variance, slope_ratio});
    }

    RunResult result;
    ResultTable verdicts = make_verdicts(cfg);
    add_verdict(verdicts, result.all_passed, "sqrt-variance-slope-is-half",
                std::abs(study.slope_sqrt_variance - 0.5) <= 1e-9,
                "slope = " + format_real(study.slope_sqrt_variance));
    add_verdict(verdicts, result.all_passed, "ratio-slope-is-minus-half",
                study.slope_ratio && std::abs(*study.slope_ratio + 0.5) <= 1e-9,
                "slope = " + format_real(slope_ratio));

    result.files.push_back(emit(table, cfg.format, cfg.output));
    result.files.push_back(emit(verdicts, cfg.format, cfg.output));
    return result;
}

inline RunResult run_theorem2(const ExperimentConfig& cfg) {
    const auto& p = std::get<Theorem2Params>(cfg.params);
    const std::vector<double> ts = linspace(0.0, p.t_max, p.t_points);

    ResultTable table = make_table(cfg, "sweep",
                                   {{"g", ColumnType::Real},
                                    {"t", ColumnType::Real},
                                    {"trace_distance", ColumnType::Real},
                                    {"offdiagonal_norm", ColumnType::Real},
                                    {"tau_m", ColumnType::Real},
                                    {"averaged_offdiag", ColumnType::Real}});

    std::vector<double> max_distance;
    std::vector<double> averaged_values;
    for (const StrongCouplingModel& model : p.models) {
        const double tau = tau_m(model);
        const double window = p.average_tau_multiple * tau;
        std::vector<DensityMatrix> series;
        series.reserve(static_cast<std::size_t>(p.average_samples));
        for (int i = 0; i < p.average_samples; ++i)
            series.push_back(analytic_rho_s(
                model, p.psi_s0,
                window * static_cast<double>(i) / static_cast<double>(p.average_samples - 1)));
        const double averaged =
            offdiagonal_norm(time_averaged_rho(series), model.v0_decomp());
        averaged_values.push_back(averaged);

        auto exact = exact_rho_s(model, p.psi_s0, ts);
        double worst = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            DensityMatrix analytic = analytic_rho_s(model, p.psi_s0, ts[i]);
            const double dist = trace_distance(exact[i], analytic);
            worst = std::max(worst, dist);
            table.push_row({model.g(), ts[i], dist,
                            offdiagonal_norm(exact[i], model.v0_decomp()), tau, averaged});
        }
        max_distance.push_back(worst);
    }

    RunResult result;
    ResultTable verdicts = make_verdicts(cfg);

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < max_distance.size(); ++i)
        monotone = monotone && max_distance[i + 1] <= max_distance[i];
    std::string ladder;
    for (std::size_t i = 0; i < max_distance.size(); ++i)
        ladder += (i ? " -> " : "") + format_real(max_distance[i]);
    add_verdict(verdicts, result.all_passed, "convergence-monotone-in-g", monotone, ladder);

    if (max_distance.size() >= 2) {
        const bool quartered = max_distance.back() <= 0.25 * max_distance.front();
        add_verdict(verdicts, result.all_passed, "strongest-coupling-quarters-the-error",
                    quartered,
                    "ratio = " + format_real(max_distance.back() / max_distance.front()));
        // fitted slope of log max-distance vs log g, recorded rather than asserted
        std::vector<double> lg, ld;
        for (std::size_t i = 0; i < p.models.size(); ++i) {
            lg.push_back(std::log(p.models[i].g()));
            ld.push_back(std::log(std::max(max_distance[i], 1e-300)));
        }
        add_verdict(verdicts, result.all_passed, "convergence-rate-recorded", true,
                    "log-log slope = " + format_real(lsq_slope(lg, ld)));
    }

    // averaging bound: |avg coherence| <= |rho_mn(0)| (2/(Omega_min T) + quadrature)
    for (std::size_t k = 0; k < p.models.size(); ++k) {
        const StrongCouplingModel& model = p.models[k];
        const double window = p.average_tau_multiple * tau_m(model);
        const double h = window / static_cast<double>(p.average_samples - 1);
        const SpectralDecomp& basis = model.v0_decomp();
        VectorXc coeff = basis.eigenvectors.adjoint() * p.psi_s0.amplitudes;
        double bound_sq = 0.0;
        for (Index m = 0; m < coeff.size(); ++m)
            for (Index n = 0; n < coeff.size(); ++n) {
                if (m == n) continue;
                const double omega = std::abs(model.phase_rate(m, n));
                const double mag = std::abs(coeff(m)) * std::abs(coeff(n));
                const double b = mag * (2.0 / (omega * window) + h * h * omega * omega / 12.0);
                bound_sq += b * b;
            }
        const bool ok = averaged_values[k] <= std::sqrt(bound_sq) + 1e-12;
        add_verdict(verdicts, result.all_passed,
                    "averaging-bound-g=" + format_real(model.g()), ok,
                    format_real(averaged_values[k]) + " <= " + format_real(std::sqrt(bound_sq)));
    }

    result.files.push_back(emit(table, cfg.format, cfg.output));
    result.files.push_back(emit(verdicts, cfg.format, cfg.output));
    return result;
}

inline RunResult run_theorem3(const ExperimentConfig& cfg) {
    const auto& p = std::get<Theorem3Params>(cfg.params);
    const std::vector<double> ts = linspace(0.0, p.t_max, p.t_points);

    ResultTable table = make_table(cfg, "sweep",
                                   {{"n", ColumnType::Integer},
                                    {"t", ColumnType::Real},
                                    {"overlap_analytic_vs_brute", ColumnType::Real},
                                    {"phase_gap", ColumnType::Real},
                                    {"separation_ratio", ColumnType::Real},
                                    {"fringe_visibility", ColumnType::Real}});

    double worst_overlap = 1.0;
    for (std::size_t k = 0; k < p.models.size(); ++k) {
        const CatModel& model = p.models[k];
        auto brute = brute_force_evolve(model, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CatEvolution ev = analytic_evolve(model, ts[i]);
            const double overlap = std::abs(ev.state.amplitudes.dot(brute[i].amplitudes));
            worst_overlap = std::min(worst_overlap, overlap);
            InterferenceMetrics metrics = interference_metrics(model, ts[i]);
            table.push_row({p.n_values[k], ts[i], overlap, metrics.phase_gap,
                            metrics.separation_ratio, metrics.fringe_visibility});
        }
    }

    RunResult result;
    ResultTable verdicts = make_verdicts(cfg);
    add_verdict(verdicts, result.all_passed, "analytic-brute-fidelity",
                worst_overlap >= 1.0 - 1e-6,
                "min overlap = " + format_real(worst_overlap));

    for (std::size_t k = 0; k + 1 < p.homogeneity_models.size(); ++k) {
        const CatModel& a = p.homogeneity_models[k];
        const CatModel& b = p.homogeneity_models[k + 1];
        if (b.n != 2 * a.n) continue;  // pairs are consecutive doublings
        InterferenceMetrics ma = interference_metrics(a, p.homogeneity_t);
        InterferenceMetrics mb = interference_metrics(b, p.homogeneity_t);
        const bool gap_ok = std::abs(mb.phase_gap - 2.0 * ma.phase_gap) <= 1e-12 * mb.phase_gap;
        const bool sep_ok = std::abs(mb.separation_ratio - 0.5 * ma.separation_ratio) <=
                            1e-12 * ma.separation_ratio;
        add_verdict(verdicts, result.all_passed,
                    "homogeneity-n-" + std::to_string(a.n) + "-to-" + std::to_string(b.n),
                    gap_ok && sep_ok,
                    "phase_gap x" + format_real(mb.phase_gap / ma.phase_gap) +
                        ", separation x" + format_real(mb.separation_ratio / ma.separation_ratio));
    }

    result.files.push_back(emit(table, cfg.format, cfg.output));
    result.files.push_back(emit(verdicts, cfg.format, cfg.output));
    return result;
}

inline RunResult run_validate_all(const ExperimentConfig& cfg) {
    ResultTable table = make_table(cfg, "checks",
                                   {{"module", ColumnType::Text},
                                    {"check", ColumnType::Text},
                                    {"pass", ColumnType::Integer},
                                    {"detail", ColumnType::Text}});
    RunResult result;
    for (const CheckResult& c : run_selfchecks(cfg.seed)) {
        table.push_row({c.module, c.name, static_cast<long long>(c.pass ? 1 : 0), c.detail});
        result.all_passed = result.all_passed && c.pass;
    }
    result.files.push_back(emit(table, cfg.format, cfg.output));
    return result;
}

}  // namespace detail

/// Executes the configured experiment. Throws on resource caps and I/O
/// problems; returns all_passed = false when a verdict fails.
inline RunResult run(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case ExperimentKind::Theorem1Scaling: return detail::run_theorem1(cfg);
        case ExperimentKind::Theorem2Decoherence: return detail::run_theorem2(cfg);
        case ExperimentKind::Theorem3Cat: return detail::run_theorem3(cfg);
        case ExperimentKind::ValidateAll: return detail::run_validate_all(cfg);
    }
    throw Error("run: unreachable experiment kind");
}

}  // namespace thermolimit
