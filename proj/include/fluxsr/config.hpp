#pragma once

// Sectioned key-value configuration:
//
//   [qubit]  ip_phi0, delta, gamma_phi, gamma_r, temperature
//   [drive]  f_dc, f_ac, omega_d            (omega_d defaults to Omega when f_ac > 0)
//   [noise]  intensity_d, tau, coupling_lambda
//   [run]    dt, t_transient, t_total, record_stride, stepper, initial_state,
//            n_realizations, master_seed, window, segment_length, estimator, components
//   [sweep]  parameter, values
//
// Every key is optional. '#' and ';' start comments. Unknown sections or keys
// are rejected with their line and column.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxsr/ensemble.hpp"

namespace fluxsr {

struct RunConfig {
    EnsembleConfig ensemble;
    std::vector<Component> components{Component::x, Component::z};
    SpectralOptions spectral{Window::hann, kDefaultSegmentLength, Estimator::power};
    std::optional<SweepAxis> sweep;

    /// EnsembleOptions for this run with the given worker count.
    EnsembleOptions options(std::size_t threads) const;
    void validate() const;
};

/// Parses, materializes defaults and validates.
RunConfig parse_config(std::string_view text);
/// Accepts a configuration file or any output file carrying an embedded echo.
RunConfig parse_config_file(const std::filesystem::path &path);

/// Lines prefixed with "#@ " in an output file hold the configuration that produced it.
inline constexpr std::string_view kEchoPrefix = "#@ ";

/// Configuration text embedded in an output file, or nullopt if there is none.
std::optional<std::string> extract_embedded_config(std::string_view file_text);

/// Fully materialized configuration in the input syntax. Numbers use the
/// shortest representation that reads back to the same double.
std::string echo_config(const RunConfig &cfg);

std::string format_number(double value);
std::string format_exact(double value);  ///< 17 significant digits

}  // namespace fluxsr
