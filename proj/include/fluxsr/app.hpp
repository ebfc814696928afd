#pragma once

// Figure presets and the file-producing commands behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluxsr/config.hpp"
#include "fluxsr/ensemble.hpp"
#include "fluxsr/output.hpp"

namespace fluxsr {

struct ExperimentPreset {
    std::string name;
    RunConfig config;  ///< includes the sweep axis
    Component component;
};

std::span<const std::string_view> preset_names();

/// Throws ConfigError(unknown_preset).
ExperimentPreset resolve_preset(std::string_view name);

/// Band searched for the response peak: the Rabi band [Omega_R/2, 3 Omega_R/2]
/// for Z under a drive, otherwise [0.7, 1.3] x Omega.
Band default_peak_band(const SimulationConfig &cfg, Component component);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<Stepper> stepper;
};

/// Applies command-line overrides and re-validates.
void apply_overrides(RunConfig &cfg, const Overrides &overrides);

struct OutputRequest {
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    std::size_t threads = 1;
    std::string name = "run";
};

/// Single trajectory with seed derive_seed(master_seed, 0), written as <name>_trajectory.
std::vector<std::filesystem::path> run_simulate(const RunConfig &cfg, const OutputRequest &request);

/// One ensemble, one file <name>_<component> per component.
std::vector<std::filesystem::path> run_ensemble_files(const RunConfig &cfg, const OutputRequest &request);

struct SweepOutcome {
    std::vector<SweepPoint> points;
    std::vector<SrPoint> sr_curve;  ///< only for noise-intensity sweeps
    std::vector<std::filesystem::path> files;

    bool all_succeeded() const;
};

/// Files <name>_<component>_<axisvalue> per point, plus sr_curve for D sweeps.
SweepOutcome run_sweep_files(const RunConfig &cfg, const OutputRequest &request);

SweepOutcome run_preset(std::string_view name, const Overrides &overrides, OutputRequest request);

}  // namespace fluxsr
