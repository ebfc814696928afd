#include "fluxsr/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

struct FftwFree {
    void operator()(void *p) const { fftw_free(p); }
};

template <typename T>
using AlignedBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
AlignedBuffer<T> aligned(std::size_t n) {
    return AlignedBuffer<T>(static_cast<T *>(fftw_malloc(sizeof(T) * n)));
}

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per length and kept for the process.
fftw_plan r2c_plan(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) {
        return it->second;
    }
    auto in = aligned<double>(n);
    auto out = aligned<fftw_complex>(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    plans.emplace(n, plan);
    return plan;
}

std::vector<double> window_weights(std::size_t n, Window window) {
    std::vector<double> w(n, 1.0);
    if (window == Window::hann) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        }
    }
    return w;
}

std::vector<double> frequency_grid(std::size_t n, double dt_sample) {
    std::vector<double> f(n / 2 + 1);
    double step = 2 * std::numbers::pi / (static_cast<double>(n) * dt_sample);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = static_cast<double>(k) * step;
    }
    return f;
}

// One-sided PSD of series[0, n) using precomputed window weights; accumulates into `acc`.
void accumulate_segment(std::span<const double> segment, double dt_sample, std::span<const double> weights,
                        double weight_power, std::span<double> acc) {
    std::size_t n = segment.size();
    double mean = 0.0;
    for (double v : segment) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    auto in = aligned<double>(n);
    auto out = aligned<fftw_complex>(n / 2 + 1);
    for (std::size_t i = 0; i < n; ++i) {
        in[i] = (segment[i] - mean) * weights[i];
    }
    fftw_execute_dft_r2c(r2c_plan(n), in.get(), out.get());

    double scale = 2 * dt_sample / weight_power;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        double re = out[k][0];
        double im = out[k][1];
        double p = scale * (re * re + im * im);
        if (k == 0 || k == n / 2) {
            p *= 0.5;
        }
        acc[k] += p;
    }
}

}  // namespace

std::string_view to_string(Window w) { return w == Window::rect ? "rect" : "hann"; }

std::string_view to_string(Component c) {
    switch (c) {
        case Component::x:
            return "X";
        case Component::y:
            return "Y";
        case Component::z:
            return "Z";
        case Component::current:
            return "I";
    }
    return "?";
}

std::string_view to_string(Estimator e) { return e == Estimator::power ? "power" : "amplitude"; }

std::optional<Window> parse_window(std::string_view text) {
    if (text == "rect") {
        return Window::rect;
    }
    if (text == "hann") {
        return Window::hann;
    }
    return std::nullopt;
}

std::optional<Component> parse_component(std::string_view text) {
    if (text == "X" || text == "x") {
        return Component::x;
    }
    if (text == "Y" || text == "y") {
        return Component::y;
    }
    if (text == "Z" || text == "z") {
        return Component::z;
    }
    if (text == "I" || text == "current") {
        return Component::current;
    }
    return std::nullopt;
}

std::optional<Estimator> parse_estimator(std::string_view text) {
    if (text == "power" || text == "psd") {
        return Estimator::power;
    }
    if (text == "amplitude") {
        return Estimator::amplitude;
    }
    return std::nullopt;
}

Spectrum periodogram(std::span<const double> series, double dt_sample, Window window) {
    return series_spectrum(series, dt_sample, SpectralOptions{window, 0, Estimator::power});
}

Spectrum series_spectrum(std::span<const double> series, double dt_sample, const SpectralOptions &options) {
    if (series.size() < 2) {
        throw SpectrumError(SpectrumError::Kind::series_too_short,
                            "series too short: " + std::to_string(series.size()) + " samples, need >= 2");
    }
    std::size_t record = std::bit_floor(series.size());
    std::size_t n = options.segment_length == 0 ? record : options.segment_length;
    if (!std::has_single_bit(n) || n < 2 || n > record) {
        throw SpectrumError(SpectrumError::Kind::series_too_short,
                            "segment length " + std::to_string(n) + " must be a power of two in [2, " +
                                std::to_string(record) + "]");
    }
    std::size_t hop = n == record ? n : n / 2;

    auto weights = window_weights(n, options.window);
    double weight_power = 0.0;
    for (double w : weights) {
        weight_power += w * w;
    }

    Spectrum out;
    out.frequencies = frequency_grid(n, dt_sample);
    out.values.assign(n / 2 + 1, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + n <= record; start += hop) {
        accumulate_segment(series.subspan(start, n), dt_sample, weights, weight_power, out.values);
        ++segments;
    }
    for (double &v : out.values) {
        v /= static_cast<double>(segments);
        if (options.estimator == Estimator::amplitude) {
            v = std::sqrt(v);
        }
    }
    return out;
}

std::vector<double> component_series(const Trajectory &traj, Component component) {
    std::vector<double> out(traj.states.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const BlochState &s = traj.states[i];
        switch (component) {
            case Component::x:
                out[i] = s.x;
                break;
            case Component::y:
                out[i] = s.y;
                break;
            case Component::z:
                out[i] = s.z;
                break;
            case Component::current:
                out[i] = traj.current_x * s.x + traj.current_z * s.z;
                break;
        }
    }
    return out;
}

Spectrum ensemble_psd(std::span<const Trajectory> trajectories, Component component,
                      const SpectralOptions &options) {
    if (trajectories.empty()) {
        throw SpectrumError(SpectrumError::Kind::grid_mismatch, "ensemble is empty");
    }
    const auto &grid = trajectories.front().times;
    if (grid.size() < 2) {
        throw SpectrumError(SpectrumError::Kind::series_too_short, "trajectory records fewer than 2 samples");
    }
    for (const auto &traj : trajectories) {
        if (traj.times != grid) {
            throw SpectrumError(SpectrumError::Kind::grid_mismatch, "trajectories do not share a time grid");
        }
    }
    double dt_sample = grid[1] - grid[0];

    Spectrum mean;
    for (const auto &traj : trajectories) {
        Spectrum s = series_spectrum(component_series(traj, component), dt_sample, options);
        if (mean.values.empty()) {
            mean = std::move(s);
            continue;
        }
        for (std::size_t k = 0; k < mean.values.size(); ++k) {
            mean.values[k] += s.values[k];
        }
    }
    for (double &v : mean.values) {
        v /= static_cast<double>(trajectories.size());
    }
    mean.n_realizations = trajectories.size();
    mean.component = component;
    return mean;
}

Spectrum ensemble_psd(std::span<const Trajectory> trajectories, Component component, Window window) {
    return ensemble_psd(trajectories, component, SpectralOptions{window, 0, Estimator::power});
}

Spectrum combine_spectra(std::span<const Spectrum> parts) {
    if (parts.empty()) {
        throw SpectrumError(SpectrumError::Kind::grid_mismatch, "nothing to combine");
    }
    Spectrum out = parts.front();
    std::size_t total = 0;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (const auto &p : parts) {
        if (p.frequencies != out.frequencies) {
            throw SpectrumError(SpectrumError::Kind::grid_mismatch, "spectra do not share a frequency grid");
        }
        for (std::size_t k = 0; k < out.values.size(); ++k) {
            out.values[k] += static_cast<double>(p.n_realizations) * p.values[k];
        }
        total += p.n_realizations;
    }
    for (double &v : out.values) {
        v /= static_cast<double>(total);
    }
    out.n_realizations = total;
    return out;
}

namespace {

std::pair<std::size_t, std::size_t> band_bins(const Spectrum &spectrum, Band band) {
    const auto &f = spectrum.frequencies;
    auto lo = std::lower_bound(f.begin(), f.end(), band.low);
    auto hi = std::upper_bound(f.begin(), f.end(), band.high);
    return {static_cast<std::size_t>(lo - f.begin()), static_cast<std::size_t>(hi - f.begin())};
}

// Offset of the half-height crossing from bin `from`, walking in direction `dir`.
std::optional<double> half_crossing(const std::vector<double> &v, std::size_t from, int dir, double half) {
    std::size_t i = from;
    while (true) {
        if ((dir < 0 && i == 0) || (dir > 0 && i + 1 >= v.size())) {
            return std::nullopt;
        }
        std::size_t j = dir < 0 ? i - 1 : i + 1;
        if (v[j] <= half) {
            double frac = (v[i] - half) / (v[i] - v[j]);
            return static_cast<double>(i > from ? i - from : from - i) + frac;
        }
        i = j;
    }
}

}  // namespace

PeakInfo find_peak(const Spectrum &spectrum, Band band) {
    if (!(band.low < band.high)) {
        throw SpectrumError(SpectrumError::Kind::bad_band, "band must satisfy low < high");
    }
    auto [first, last] = band_bins(spectrum, band);
    if (last <= first || last - first < 5) {
        throw SpectrumError(SpectrumError::Kind::bad_band, "band [" + std::to_string(band.low) + ", " +
                                                               std::to_string(band.high) +
                                                               "] holds fewer than 5 bins");
    }
    const auto &v = spectrum.values;
    std::size_t best = first;
    for (std::size_t k = first; k < last; ++k) {
        if (v[k] > v[best]) {
            best = k;
        }
    }
    if (best == first || best == last - 1) {
        throw SpectrumError(SpectrumError::Kind::no_local_maximum,
                            "no local maximum: spectrum peaks at the band edge " +
                                std::to_string(spectrum.frequencies[best]));
    }

    double step = spectrum.resolution();
    double left = v[best - 1];
    double mid = v[best];
    double right = v[best + 1];
    double curvature = left - 2 * mid + right;
    double offset = curvature < 0 ? 0.5 * (left - right) / curvature : 0.0;

    double half = 0.5 * mid;
    auto lw = half_crossing(v, best, -1, half);
    auto rw = half_crossing(v, best, +1, half);
    double width_bins;
    if (lw && rw) {
        width_bins = *lw + *rw;
    } else if (lw || rw) {
        width_bins = 2 * (lw ? *lw : *rw);
    } else {
        width_bins = static_cast<double>(v.size() - 1);
    }
    return {spectrum.frequencies[best] + offset * step, mid, width_bins * step, best};
}

double band_average(const Spectrum &spectrum, Band band) {
    auto [first, last] = band_bins(spectrum, band);
    if (last <= first) {
        throw SpectrumError(SpectrumError::Kind::bad_band, "band holds no bins");
    }
    double sum = 0.0;
    for (std::size_t k = first; k < last; ++k) {
        sum += spectrum.values[k];
    }
    return sum / static_cast<double>(last - first);
}

std::vector<SrPoint> sr_curve(std::span<const std::pair<double, Spectrum>> results, Band band) {
    std::vector<SrPoint> out;
    out.reserve(results.size());
    for (const auto &[intensity, spectrum] : results) {
        SrPoint point{intensity, std::nullopt, {}};
        try {
            point.peak = find_peak(spectrum, band);
        } catch (const SpectrumError &e) {
            point.error = e.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

}  // namespace fluxsr
