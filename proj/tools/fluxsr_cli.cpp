// Command-line front end: single trajectories, ensemble spectra, sweeps and figure presets.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numeric instability, 4 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fluxsr/app.hpp"
#include "fluxsr/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    std::string out_dir = ".";
    std::string format = "csv";
    std::string stepper;
    std::string name = "run";
};

void add_common(CLI::App *cmd, CommonFlags &flags, bool with_config) {
    if (with_config) {
        cmd->add_option("--config", flags.config_path, "configuration file (or an output file to re-run)");
        cmd->add_option("--name", flags.name, "output file prefix");
    }
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--threads", flags.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--format", flags.format, "csv or structured")->check(CLI::IsMember({"csv", "structured"}));
    cmd->add_option("--stepper", flags.stepper, "ito or heun")->check(CLI::IsMember({"ito", "heun"}));
}

fluxsr::Overrides overrides_from(const CommonFlags &flags) {
    fluxsr::Overrides o;
    o.seed = flags.seed;
    if (!flags.stepper.empty()) {
        o.stepper = fluxsr::parse_stepper(flags.stepper);
    }
    return o;
}

fluxsr::OutputRequest request_from(const CommonFlags &flags) {
    fluxsr::OutputRequest r;
    r.out_dir = flags.out_dir;
    r.format = *fluxsr::parse_output_format(flags.format);
    r.threads = flags.threads;
    r.name = flags.name;
    return r;
}

fluxsr::RunConfig load(const CommonFlags &flags) {
    fluxsr::RunConfig cfg = flags.config_path.empty() ? fluxsr::parse_config("")
                                                      : fluxsr::parse_config_file(flags.config_path);
    fluxsr::apply_overrides(cfg, overrides_from(flags));
    return cfg;
}

void report(const std::vector<std::filesystem::path> &files) {
    for (const auto &f : files) {
        std::cout << f.string() << '\n';
    }
}

int report_sweep(const fluxsr::SweepOutcome &outcome) {
    report(outcome.files);
    int code = 0;
    for (const auto &p : outcome.points) {
        if (!p.result) {
            std::cerr << "point " << fluxsr::format_number(p.value) << " failed: " << p.error << '\n';
            code = kExitNumeric;
        }
    }
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stochastic Bloch-equation simulator for a noise-driven flux qubit"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto *simulate = app.add_subcommand("simulate", "integrate one trajectory and dump t,X,Y,Z,I");
    add_common(simulate, flags, true);
    auto *ensemble = app.add_subcommand("ensemble", "ensemble-averaged spectra for one configuration");
    add_common(ensemble, flags, true);
    auto *sweep = app.add_subcommand("sweep", "ensemble spectra along one parameter axis");
    add_common(sweep, flags, true);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "noise_intensity_d, noise_tau, drive_f_ac or drive_omega_d");
    sweep->add_option("--values", values, "axis values")->delimiter(',');
    auto *preset = app.add_subcommand("preset", "reproduce a figure: fig1a, fig1b, fig2a or fig2b");
    add_common(preset, flags, false);
    std::string preset_name;
    preset->add_option("name", preset_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            report(fluxsr::run_simulate(load(flags), request_from(flags)));
        } else if (ensemble->parsed()) {
            report(fluxsr::run_ensemble_files(load(flags), request_from(flags)));
        } else if (sweep->parsed()) {
            fluxsr::RunConfig cfg = load(flags);
            if (!axis.empty() || !values.empty()) {
                auto parameter = fluxsr::parse_sweep_parameter(axis.empty() ? "noise_intensity_d" : axis);
                if (!parameter) {
                    throw fluxsr::ConfigError(fluxsr::ConfigError::Kind::validation,
                                              "invalid sweep: unknown axis '" + axis + "'");
                }
                cfg.sweep = fluxsr::SweepAxis{*parameter, values};
                cfg.validate();
            }
            return report_sweep(fluxsr::run_sweep_files(cfg, request_from(flags)));
        } else if (preset->parsed()) {
            return report_sweep(fluxsr::run_preset(preset_name, overrides_from(flags), request_from(flags)));
        }
    } catch (const fluxsr::ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fluxsr::NumericOverflow &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const fluxsr::IoError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
