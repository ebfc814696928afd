#pragma once

// Reproducible ensembles of independent noise realizations and parameter sweeps.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxsr/integrator.hpp"
#include "fluxsr/spectra.hpp"

namespace fluxsr {

inline constexpr std::uint64_t kDefaultMasterSeed = 20100325;
inline constexpr std::size_t kDefaultRealizations = 50;

/// Added (mod 2^64) to the master seed once per sweep-axis index.
inline constexpr std::uint64_t kSweepSeedOffset = 0x9E3779B97F4A7C15ULL;

struct EnsembleConfig {
    SimulationConfig base;
    std::size_t n_realizations = kDefaultRealizations;
    std::uint64_t master_seed = kDefaultMasterSeed;
    /// Trajectory i of this run uses derive_seed(master_seed, first_index + i),
    /// so disjoint index ranges partition one larger ensemble.
    std::size_t first_index = 0;

    void validate() const;
};

struct EnsembleOptions {
    std::vector<Component> components{Component::x, Component::z};
    SpectralOptions spectral;
    std::size_t threads = 1;
    bool keep_trajectories = false;
};

struct EnsembleResult {
    std::vector<Spectrum> spectra;  ///< one per requested component, in request order
    std::vector<Trajectory> trajectories;  ///< filled only with keep_trajectories

    const Spectrum &spectrum(Component c) const;
};

/// Runs n_realizations trajectories on `threads` workers. The result does not
/// depend on the worker count: spectra are summed in trajectory-index order.
/// Fails fast with NumericOverflow carrying the lowest failing index.
EnsembleResult run_ensemble(const EnsembleConfig &cfg, const EnsembleOptions &options);

enum class SweepParameter { noise_intensity_d, noise_tau, drive_f_ac, drive_omega_d };

std::string_view to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view text);

struct SweepAxis {
    SweepParameter parameter = SweepParameter::noise_intensity_d;
    std::vector<double> values;

    void validate() const;
};

SimulationConfig apply_axis(SimulationConfig cfg, SweepParameter parameter, double value);

std::uint64_t sweep_point_seed(std::uint64_t master_seed, std::size_t axis_index);

struct SweepPoint {
    double value;
    EnsembleConfig config;  ///< resolved configuration of this point
    std::optional<EnsembleResult> result;
    std::string error;  ///< set when result is empty
};

/// One independent ensemble per axis value, in axis order. A failing point
/// is reported and the sweep continues.
std::vector<SweepPoint> sweep(const EnsembleConfig &cfg, const SweepAxis &axis, const EnsembleOptions &options);

}  // namespace fluxsr
