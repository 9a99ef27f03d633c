// thermolimit: runs the three theorem experiments and the validation suite
// from a JSON config, writing machine-readable result tables.
//
// Exit codes: 0 success, 1 a verdict failed, 2 invalid config, 3 resource cap.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thermolimit/config.hpp"
#include "thermolimit/experiments.hpp"
#include "thermolimit/version.hpp"

namespace {

int execute(thermolimit::ExperimentConfig cfg, const std::string& out_dir,
            const std::string& format, bool have_seed, std::uint64_t seed) {
    using namespace thermolimit;
    if (!out_dir.empty()) cfg.output = out_dir;
    if (have_seed) cfg.seed = seed;
    if (!format.empty()) {
        if (format == "csv")
            cfg.format = OutputFormat::Csv;
        else if (format == "json")
            cfg.format = OutputFormat::Json;
        else
            throw ConfigError("--format: expected 'csv' or 'json'");
    }

    RunResult result = run(cfg);
    for (const auto& file : result.files) std::cout << "wrote " << file.string() << "\n";
    if (!result.all_passed) {
        std::cout << experiment_name(cfg.experiment) << ": FAILED checks, see verdicts\n";
        return 1;
    }
    std::cout << experiment_name(cfg.experiment) << ": all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace thermolimit;

    CLI::App app{"thermolimit: ensemble classicality, strong-coupling dephasing and "
                 "cat-state interference experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;

    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    run_cmd->add_option("--config", config_path, "path to the JSON config")->required();
    run_cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
    run_cmd->add_option("--format", format, "csv or json (overrides config)");
    auto* seed_opt_run =
        run_cmd->add_option("--seed", seed, "seed for randomized validation matrices");

    auto* validate_cmd =
        app.add_subcommand("validate", "run every module's invariant suite with defaults");
    validate_cmd->add_option("--out-dir", out_dir, "output directory");
    validate_cmd->add_option("--format", format, "csv or json");
    auto* seed_opt_validate =
        validate_cmd->add_option("--seed", seed, "seed for randomized validation matrices");

    CLI11_PARSE(app, argc, argv);

    const bool have_seed = seed_opt_run->count() > 0 || seed_opt_validate->count() > 0;

    try {
        if (app.got_subcommand(validate_cmd)) {
            ExperimentConfig cfg = parse_config_text(R"({"experiment": "validate-all"})");
            return execute(std::move(cfg), out_dir, format, have_seed, seed);
        }
        return execute(parse_config_file(config_path), out_dir, format, have_seed, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TooLarge& e) {
        std::cerr << "resource cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
