#pragma once

// Spectral densities of recorded Bloch components and peak observables.
//
// Values are one-sided power spectral densities per unit ordinary frequency:
// integrating them over omega / (2 pi) returns the variance of the series.
// The abscissa is the angular frequency omega. Absolute levels carry
// arbitrary units; only ratios and orderings are meaningful downstream.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluxsr/integrator.hpp"

namespace fluxsr {

enum class Window { rect, hann };
enum class Component { x, y, z, current };
/// power: mean of periodograms. amplitude: mean of their square roots.
enum class Estimator { power, amplitude };

std::string_view to_string(Window w);
std::string_view to_string(Component c);
std::string_view to_string(Estimator e);
std::optional<Window> parse_window(std::string_view text);
std::optional<Component> parse_component(std::string_view text);
std::optional<Estimator> parse_estimator(std::string_view text);

struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> values;
    std::size_t n_realizations = 1;
    Component component = Component::x;

    /// Spacing of the frequency grid (one bin).
    double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
    std::size_t size() const { return values.size(); }
};

/// Periodogram of the mean-subtracted, windowed series truncated to the
/// largest power of two. Throws SpectrumError(series_too_short) below 2 samples.
Spectrum periodogram(std::span<const double> series, double dt_sample, Window window);

/// Segment length used by configurations that do not set one: resolution
/// 2 pi / (16384 * 0.01 ns) ~ 0.038 rad/ns, well below the 2 Gamma linewidth.
inline constexpr std::size_t kDefaultSegmentLength = 16384;

struct SpectralOptions {
    Window window = Window::hann;
    /// Segment length for averaging within a trajectory (half-overlapping
    /// segments); 0 uses one segment spanning the whole record.
    std::size_t segment_length = 0;
    Estimator estimator = Estimator::power;
};

/// Averaged periodogram of a single series under `options`.
Spectrum series_spectrum(std::span<const double> series, double dt_sample, const SpectralOptions &options);

std::vector<double> component_series(const Trajectory &traj, Component component);

/// Arithmetic mean of per-trajectory spectra, reduced in index order.
/// Throws SpectrumError(grid_mismatch) if the time grids differ.
Spectrum ensemble_psd(std::span<const Trajectory> trajectories, Component component,
                      const SpectralOptions &options);
Spectrum ensemble_psd(std::span<const Trajectory> trajectories, Component component, Window window);

/// Realization-weighted mean of spectra on a common grid.
Spectrum combine_spectra(std::span<const Spectrum> parts);

struct Band {
    double low;
    double high;
};

struct PeakInfo {
    double frequency;
    double height;
    double fwhm;
    std::size_t bin;
};

/// Maximum bin in `band`, refined by a three-point parabola; FWHM from linear
/// interpolation of the half-height crossings. Throws SpectrumError
/// (no_local_maximum) when the maximum sits on a band edge.
PeakInfo find_peak(const Spectrum &spectrum, Band band);

/// Mean spectral value over bins with frequency in [low, high].
double band_average(const Spectrum &spectrum, Band band);

struct SrPoint {
    double noise_intensity;
    std::optional<PeakInfo> peak;
    std::string error;  ///< set when peak is empty
};

/// Peak height per noise intensity, in input order. Failures are marked per point.
std::vector<SrPoint> sr_curve(std::span<const std::pair<double, Spectrum>> results, Band band);

}  // namespace fluxsr
