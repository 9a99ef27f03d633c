#pragma once

// Experiment configuration: one JSON file per run, validated completely
// before any computation starts. Model invariants are enforced here by
// constructing the actual model objects, so a bad config can never produce
// partial output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "thermolimit/catdynamics.hpp"
#include "thermolimit/ensemble.hpp"
#include "thermolimit/errors.hpp"
#include "thermolimit/hilbert.hpp"
#include "thermolimit/io.hpp"
#include "thermolimit/strongcoupling.hpp"

namespace thermolimit {

enum class ExperimentKind { Theorem1Scaling, Theorem2Decoherence, Theorem3Cat, ValidateAll };

inline std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Theorem1Scaling: return "theorem1-scaling";
        case ExperimentKind::Theorem2Decoherence: return "theorem2-decoherence";
        case ExperimentKind::Theorem3Cat: return "theorem3-cat";
        case ExperimentKind::ValidateAll: return "validate-all";
    }
    return "unknown";
}

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::set<std::string>& required, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    for (const std::string& key : required)
        if (!obj.count(key)) throw ConfigError(where + ": missing key '" + key + "'");
}

inline double get_real(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

inline Complex get_complex(const nlohmann::json& v, const std::string& where) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex(v[0].get<double>(), v[1].get<double>());
    throw ConfigError(where + ": expected a number or [re, im] pair");
}

inline MatrixXc get_matrix(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a matrix");
    const Index rows = static_cast<Index>(v.size());
    MatrixXc m(rows, rows);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != rows)
            throw ConfigError(where + ": matrix must be square");
        for (Index j = 0; j < rows; ++j)
            m(i, j) = get_complex(row[static_cast<std::size_t>(j)], where);
    }
    return m;
}

inline Operator get_operator(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        if (name == "sigma_x") return pauli_x();
        if (name == "sigma_y") return pauli_y();
        if (name == "sigma_z") return pauli_z();
        if (name == "identity2") return identity_op(2);
        throw ConfigError(where + ": unknown operator preset '" + name + "'");
    }
    MatrixXc m = get_matrix(v, where);
    const Index dim = m.rows();
    try {
        return Operator::hermitian_op(std::move(m), {dim});
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline StateVector get_state(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected an amplitude array");
    VectorXc amps(static_cast<Index>(v.size()));
    for (Index i = 0; i < amps.size(); ++i)
        amps(i) = get_complex(v[static_cast<std::size_t>(i)], where);
    const Index dim = amps.size();
    try {
        return StateVector(std::move(amps), {dim});
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

inline std::vector<long long> get_int_list(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array");
    std::vector<long long> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(where + ": expected integers");
        out.push_back(e.get<long long>());
    }
    return out;
}

inline std::vector<double> get_real_list(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(get_real(e, where));
    return out;
}

}  // namespace detail

struct Theorem1Params {
    SubsystemSpec tmpl;
    std::vector<long long> n_values;
    double t = 0.0;
};

struct Theorem2Params {
    StateVector psi_s0;
    std::vector<double> g_values;
    double t_max = 0.0;
    int t_points = 0;
    double average_tau_multiple = 50.0;
    int average_samples = 16001;
    std::vector<StrongCouplingModel> models;  // one per g, validated up front
};

struct Theorem3Params {
    std::vector<long long> n_values;
    double t_max = 0.0;
    int t_points = 0;
    std::vector<long long> homogeneity_n;
    double homogeneity_t = 1.0;
    std::vector<CatModel> models;              // one per n
    std::vector<CatModel> homogeneity_models;  // one per homogeneity n
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::ValidateAll;
    std::uint64_t seed = 0;
    std::filesystem::path output = "out";
    OutputFormat format = OutputFormat::Csv;
    std::variant<std::monostate, Theorem1Params, Theorem2Params, Theorem3Params> params;
    std::string raw_text;  // byte-exact config echo for table metadata
};

namespace detail {

inline Theorem1Params parse_theorem1(const nlohmann::json& p) {
    require_keys(p, {"template", "n_values", "t"}, {"template", "n_values", "t"},
                 "theorem1-scaling parameters");
    const auto& tj = p.at("template");
    require_keys(tj, {"h", "a", "psi0"}, {"h", "a", "psi0"}, "template");
    try {
        SubsystemSpec tmpl(get_operator(tj.at("h"), "template.h"),
                           get_operator(tj.at("a"), "template.a"),
                           get_state(tj.at("psi0"), "template.psi0"));
        Theorem1Params out{std::move(tmpl), get_int_list(p.at("n_values"), "n_values"),
                           get_real(p.at("t"), "t")};
        for (long long n : out.n_values)
            if (n < 1) throw ConfigError("n_values: entries must be >= 1");
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("theorem1-scaling parameters: ") + e.what());
    }
}

inline Theorem2Params parse_theorem2(const nlohmann::json& p) {
    require_keys(p,
                 {"h_s", "v0", "psi_s0", "n", "a_values", "g_values", "t_max", "t_points",
                  "average_tau_multiple", "average_samples", "h_bath"},
                 {"h_s", "v0", "psi_s0", "n", "a_values", "g_values", "t_max", "t_points"},
                 "theorem2-decoherence parameters");
    try {
        Operator h_s = get_operator(p.at("h_s"), "h_s");
        Operator v0 = get_operator(p.at("v0"), "v0");
        StateVector psi_s0 = get_state(p.at("psi_s0"), "psi_s0");
        if (!p.at("n").is_number_integer()) throw ConfigError("n: expected an integer");
        const long long n = p.at("n").get<long long>();
        std::vector<double> a_values = get_real_list(p.at("a_values"), "a_values");
        std::optional<Operator> h_bath;
        if (p.count("h_bath")) h_bath = get_operator(p.at("h_bath"), "h_bath");

        Theorem2Params out{std::move(psi_s0),
                           get_real_list(p.at("g_values"), "g_values"),
                           get_real(p.at("t_max"), "t_max"),
                           p.at("t_points").get<int>(),
                           p.count("average_tau_multiple")
                               ? get_real(p.at("average_tau_multiple"), "average_tau_multiple")
                               : 50.0,
                           p.count("average_samples") ? p.at("average_samples").get<int>() : 16001,
                           {}};
        if (out.t_points < 2) throw ConfigError("t_points: need at least 2");
        if (out.average_samples < 2) throw ConfigError("average_samples: need at least 2");
        if (!(out.t_max > 0.0)) throw ConfigError("t_max: must be positive");
        for (double g : out.g_values)
            out.models.emplace_back(h_s, v0, n, a_values, g, h_bath);
        if (out.models.empty()) throw ConfigError("g_values: must be nonempty");
        if (out.psi_s0.dim() != out.models.front().system_dim())
            throw ConfigError("psi_s0: dimension does not match h_s");
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("theorem2-decoherence parameters: ") + e.what());
    }
}

inline Theorem3Params parse_theorem3(const nlohmann::json& p) {
    require_keys(p,
                 {"omega", "gamma", "alpha", "phi", "a_bar", "n_values", "t_max", "t_points",
                  "homogeneity_n", "homogeneity_t", "cutoff"},
                 {"omega", "gamma", "alpha", "phi", "a_bar", "n_values", "t_max", "t_points"},
                 "theorem3-cat parameters");
    try {
        const double omega = get_real(p.at("omega"), "omega");
        const Complex gamma = get_complex(p.at("gamma"), "gamma");
        const double alpha = get_real(p.at("alpha"), "alpha");
        const double phi = get_real(p.at("phi"), "phi");
        const double a_bar = get_real(p.at("a_bar"), "a_bar");

        Theorem3Params out;
        out.n_values = get_int_list(p.at("n_values"), "n_values");
        out.t_max = get_real(p.at("t_max"), "t_max");
        out.t_points = p.at("t_points").get<int>();
        if (out.t_points < 2) throw ConfigError("t_points: need at least 2");
        if (!(out.t_max > 0.0)) throw ConfigError("t_max: must be positive");
        if (p.count("homogeneity_n"))
            out.homogeneity_n = get_int_list(p.at("homogeneity_n"), "homogeneity_n");
        if (p.count("homogeneity_t"))
            out.homogeneity_t = get_real(p.at("homogeneity_t"), "homogeneity_t");

        auto make_model = [&](long long n) {
            const double beta_max = 2.0 * std::abs(static_cast<double>(n) * a_bar * gamma) / omega;
            Index cutoff = adequate_cutoff(beta_max + alpha);
            if (p.count("cutoff")) cutoff = std::max<Index>(cutoff, p.at("cutoff").get<Index>());
            return CatModel(omega, gamma, alpha, phi, n, a_bar, cutoff);
        };
        for (long long n : out.n_values) out.models.push_back(make_model(n));
        for (long long n : out.homogeneity_n) out.homogeneity_models.push_back(make_model(n));
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("theorem3-cat parameters: ") + e.what());
    }
}

}  // namespace detail

/// Parses and fully validates a config document. Throws ConfigError on any
/// structural or semantic problem.
inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    detail::require_keys(doc, {"experiment", "seed", "output", "format", "parameters"},
                         {"experiment"}, "config");

    ExperimentConfig cfg;
    cfg.raw_text = text;
    const std::string name = doc.at("experiment").is_string()
                                 ? doc.at("experiment").get<std::string>()
                                 : throw ConfigError("experiment: expected a string");
    if (name == "theorem1-scaling")
        cfg.experiment = ExperimentKind::Theorem1Scaling;
    else if (name == "theorem2-decoherence")
        cfg.experiment = ExperimentKind::Theorem2Decoherence;
    else if (name == "theorem3-cat")
        cfg.experiment = ExperimentKind::Theorem3Cat;
    else if (name == "validate-all")
        cfg.experiment = ExperimentKind::ValidateAll;
    else
        throw ConfigError("experiment: unknown experiment '" + name + "'");

    if (doc.count("seed")) {
        if (!doc.at("seed").is_number_unsigned())
            throw ConfigError("seed: expected an unsigned integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.count("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("output: expected a string");
        cfg.output = doc.at("output").get<std::string>();
    }
    if (doc.count("format")) {
        const std::string f = doc.at("format").is_string()
                                  ? doc.at("format").get<std::string>()
                                  : throw ConfigError("format: expected a string");
        if (f == "csv")
            cfg.format = OutputFormat::Csv;
        else if (f == "json")
            cfg.format = OutputFormat::Json;
        else
            throw ConfigError("format: expected 'csv' or 'json'");
    }

    const nlohmann::json params =
        doc.count("parameters") ? doc.at("parameters") : nlohmann::json::object();
    switch (cfg.experiment) {
        case ExperimentKind::Theorem1Scaling:
            cfg.params = detail::parse_theorem1(params);
            break;
        case ExperimentKind::Theorem2Decoherence:
            cfg.params = detail::parse_theorem2(params);
            break;
        case ExperimentKind::Theorem3Cat:
            cfg.params = detail::parse_theorem3(params);
            break;
        case ExperimentKind::ValidateAll:
            detail::require_keys(params, {}, {}, "validate-all parameters");
            cfg.params = std::monostate{};
            break;
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace thermolimit
