#pragma once

// Plot-ready output files. Every file starts with '#' metadata lines and the
// configuration echo ("#@ " lines) that reproduces it byte for byte.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fluxsr/config.hpp"
#include "fluxsr/spectra.hpp"

namespace fluxsr {

enum class OutputFormat { csv, structured };

std::optional<OutputFormat> parse_output_format(std::string_view text);
std::string_view file_extension(OutputFormat f);

/// `cfg` is the configuration of the ensemble that produced `spectrum`.
std::string render_spectrum(const Spectrum &spectrum, const RunConfig &cfg, OutputFormat format);

/// Columns noise_intensity_d,height,frequency,fwhm; failed points carry nan and a comment.
std::string render_sr_curve(std::span<const SrPoint> curve, const RunConfig &cfg, Component component, Band band,
                            OutputFormat format);

/// Columns t,X,Y,Z,I with I the circulating current in units of I_p.
std::string render_trajectory(const Trajectory &traj, const RunConfig &cfg, OutputFormat format);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path &path, std::string_view text);

}  // namespace fluxsr
