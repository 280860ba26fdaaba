// Command-line front end: parameter sweeps, canned figure presets, and
// config validation for the quantum-scissors simulator.

#include <clocale>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qsd/qsd.hpp"

namespace {

void print_written(const std::vector<std::filesystem::path>& paths) {
    for (const auto& path : paths) std::cout << "wrote " << path.string() << "\n";
}

int rows_in(const qsd::SweepConfig& config) {
    int rows = 1;
    if (config.axis1) rows *= int(config.axis1->values.size());
    if (config.axis2) rows *= int(config.axis2->values.size());
    if (config.model == qsd::RunModel::Realistic)
        rows *= int(config.uses_strategies() ? config.strategies.size()
                                             : config.patterns.size());
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"quantum scissors device: truncation simulator and analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = ".";
    int cutoff_override = 0;
    int threads = 1;
    long long seed = 0;
    app.add_option("--out", out_dir, "output directory for CSV files")
        ->capture_default_str();
    app.add_option("--cutoff", cutoff_override,
                   "override the single-mode cutoff dimension (n_max)");
    app.add_option("--threads", threads, "advisory worker count (evaluation is serial)");
    const auto* seed_opt =
        app.add_option("--seed", seed, "not supported: all computations are deterministic");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep described by a config file");
    std::string sweep_config_path;
    sweep_cmd->add_option("config", sweep_config_path, "path to a flat key=value config file")
        ->required();

    auto* figure_cmd = app.add_subcommand("figure", "run a canned figure preset");
    std::string preset_id;
    figure_cmd->add_option("preset", preset_id, "preset id (see list-presets)")->required();

    auto* validate_cmd =
        app.add_subcommand("validate", "parse and validate a config file without running it");
    std::string validate_config_path;
    validate_cmd->add_option("config", validate_config_path, "path to a config file")->required();

    auto* list_cmd = app.add_subcommand("list-presets", "list available figure presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (seed_opt->count() > 0) {
            std::cerr << "error: --seed is not supported; every computation is deterministic "
                         "and repeated runs are byte-identical\n";
            return 2;
        }
        if (threads < 1) {
            std::cerr << "error: --threads must be >= 1\n";
            return 2;
        }

        const auto apply_cutoff = [&](qsd::SweepConfig& config) {
            if (cutoff_override != 0) {
                config.base.cutoff = qsd::CutoffDim(cutoff_override);
                config.base.validate();
            }
        };

        if (sweep_cmd->parsed()) {
            qsd::SweepConfig config = qsd::parse_sweep_config_file(sweep_config_path);
            apply_cutoff(config);
            qsd::RunOptions options;
            options.out_dir = out_dir;
            options.stem = std::filesystem::path(sweep_config_path).stem().string();
            options.threads = threads;
            print_written(qsd::run_sweep(config, options));
            return 0;
        }
        if (figure_cmd->parsed()) {
            const qsd::FigurePreset* preset = qsd::find_figure_preset(preset_id);
            if (preset == nullptr) {
                std::cerr << "error: unknown preset '" << preset_id
                          << "' (run `qsd list-presets`)\n";
                return 2;
            }
            if (cutoff_override != 0) {
                qsd::FigurePreset adjusted = *preset;
                for (auto& run : adjusted.runs) apply_cutoff(run.config);
                print_written(qsd::run_figure_preset(adjusted, out_dir, threads));
                return 0;
            }
            print_written(qsd::run_figure_preset(*preset, out_dir, threads));
            return 0;
        }
        if (validate_cmd->parsed()) {
            const qsd::SweepConfig config = qsd::parse_sweep_config_file(validate_config_path);
            std::cout << "OK: model=" << qsd::to_string(config.model) << ", rows=" << rows_in(config)
                      << ", observables=" << config.observables.size() << "\n";
            return 0;
        }
        if (list_cmd->parsed()) {
            for (const auto& preset : qsd::figure_presets())
                std::printf("%-8s %s\n", preset.id.c_str(), preset.description.c_str());
            return 0;
        }
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const qsd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsd::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsd::DegenerateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
