#include "fluxsr/app.hpp"

#include <array>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

constexpr std::array<std::string_view, 4> kPresets = {"fig1a", "fig1b", "fig2a", "fig2b"};

std::filesystem::path output_path(const OutputRequest &request, const std::string &stem) {
    return request.out_dir / (stem + std::string(file_extension(request.format)));
}

RunConfig point_config(const RunConfig &cfg, const SweepPoint &point) {
    RunConfig out = cfg;
    out.sweep.reset();
    out.ensemble = point.config;
    return out;
}

}  // namespace

std::span<const std::string_view> preset_names() { return kPresets; }

ExperimentPreset resolve_preset(std::string_view name) {
    RunConfig cfg;
    SimulationConfig &base = cfg.ensemble.base;
    base.drive.omega_d = base.splitting();
    const std::vector<double> intensities{1e-7, 1e-6, 1e-5, 1e-4};
    const std::vector<double> taus{0.0, 2.0, 5.0};

    Component component;
    if (name == "fig1a" || name == "fig1b") {
        component = Component::x;
    } else if (name == "fig2a" || name == "fig2b") {
        component = Component::z;
        base.drive.f_ac = 0.005;
    } else {
        std::string known;
        for (auto p : kPresets) {
            known += (known.empty() ? "" : ", ") + std::string(p);
        }
        throw ConfigError(ConfigError::Kind::unknown_preset,
                          "unknown preset '" + std::string(name) + "'; expected one of " + known);
    }
    if (name.ends_with('a')) {
        cfg.sweep = SweepAxis{SweepParameter::noise_intensity_d, intensities};
    } else {
        base.noise.intensity_d = 1e-6;
        cfg.sweep = SweepAxis{SweepParameter::noise_tau, taus};
    }
    cfg.components = {component};
    cfg.validate();
    return {std::string(name), cfg, component};
}

Band default_peak_band(const SimulationConfig &cfg, Component component) {
    if (component == Component::z && cfg.drive.f_ac > 0) {
        double rabi = rabi_frequency(cfg.qubit, cfg.drive);
        return {0.5 * rabi, 1.5 * rabi};
    }
    double omega = cfg.splitting();
    return {0.7 * omega, 1.3 * omega};
}

void apply_overrides(RunConfig &cfg, const Overrides &overrides) {
    if (overrides.seed) {
        cfg.ensemble.master_seed = *overrides.seed;
    }
    if (overrides.stepper) {
        cfg.ensemble.base.stepper = *overrides.stepper;
    }
    cfg.validate();
}

std::vector<std::filesystem::path> run_simulate(const RunConfig &cfg, const OutputRequest &request) {
    cfg.validate();
    Trajectory traj = simulate_trajectory(cfg.ensemble.base, derive_seed(cfg.ensemble.master_seed, 0));
    auto path = output_path(request, request.name + "_trajectory");
    write_file(path, render_trajectory(traj, cfg, request.format));
    return {path};
}

std::vector<std::filesystem::path> run_ensemble_files(const RunConfig &cfg, const OutputRequest &request) {
    cfg.validate();
    EnsembleResult result = run_ensemble(cfg.ensemble, cfg.options(request.threads));
    std::vector<std::filesystem::path> files;
    for (const auto &spectrum : result.spectra) {
        auto path = output_path(request, request.name + "_" + std::string(to_string(spectrum.component)));
        write_file(path, render_spectrum(spectrum, cfg, request.format));
        files.push_back(path);
    }
    return files;
}

bool SweepOutcome::all_succeeded() const {
    for (const auto &p : points) {
        if (!p.result) {
            return false;
        }
    }
    return true;
}

SweepOutcome run_sweep_files(const RunConfig &cfg, const OutputRequest &request) {
    cfg.validate();
    if (!cfg.sweep) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: sweep requires a [sweep] axis");
    }
    SweepOutcome outcome;
    outcome.points = sweep(cfg.ensemble, *cfg.sweep, cfg.options(request.threads));

    for (const auto &point : outcome.points) {
        if (!point.result) {
            continue;
        }
        RunConfig echo = point_config(cfg, point);
        for (const auto &spectrum : point.result->spectra) {
            auto stem = request.name + "_" + std::string(to_string(spectrum.component)) + "_" +
                        format_number(point.value);
            auto path = output_path(request, stem);
            write_file(path, render_spectrum(spectrum, echo, request.format));
            outcome.files.push_back(path);
        }
    }

    if (cfg.sweep->parameter == SweepParameter::noise_intensity_d) {
        Component component = cfg.components.front();
        Band band = default_peak_band(cfg.ensemble.base, component);
        for (const auto &point : outcome.points) {
            if (!point.result) {
                outcome.sr_curve.push_back({point.value, std::nullopt, point.error});
                continue;
            }
            std::pair<double, Spectrum> one{point.value, point.result->spectrum(component)};
            outcome.sr_curve.push_back(sr_curve(std::span(&one, 1), band).front());
        }
        auto path = output_path(request, "sr_curve");
        write_file(path, render_sr_curve(outcome.sr_curve, cfg, component, band, request.format));
        outcome.files.push_back(path);
    }
    return outcome;
}

SweepOutcome run_preset(std::string_view name, const Overrides &overrides, OutputRequest request) {
    ExperimentPreset preset = resolve_preset(name);
    apply_overrides(preset.config, overrides);
    request.name = preset.name;
    return run_sweep_files(preset.config, request);
}

}  // namespace fluxsr
