#include "fluxsr/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

struct Slot {
    std::vector<Spectrum> spectra;
    std::optional<Trajectory> trajectory;
    std::optional<NumericOverflow> failure;
};

Slot run_one(const EnsembleConfig &cfg, const EnsembleOptions &options, std::size_t index) {
    Slot slot;
    std::uint64_t seed = derive_seed(cfg.master_seed, cfg.first_index + index);
    try {
        Trajectory traj = simulate_trajectory(cfg.base, seed);
        double dt_sample = cfg.base.sample_interval();
        for (Component c : options.components) {
            slot.spectra.push_back(series_spectrum(component_series(traj, c), dt_sample, options.spectral));
        }
        if (options.keep_trajectories) {
            slot.trajectory = std::move(traj);
        }
    } catch (const NumericOverflow &e) {
        slot.failure = NumericOverflow(e.time(), e.norm(), cfg.first_index + index);
    }
    return slot;
}

}  // namespace

void EnsembleConfig::validate() const {
    base.validate();
    if (n_realizations < 1) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: run.n_realizations must be >= 1");
    }
}

const Spectrum &EnsembleResult::spectrum(Component c) const {
    for (const auto &s : spectra) {
        if (s.component == c) {
            return s;
        }
    }
    throw Error("ensemble result holds no spectrum for component " + std::string(to_string(c)));
}

EnsembleResult run_ensemble(const EnsembleConfig &cfg, const EnsembleOptions &options) {
    cfg.validate();
    const std::size_t n = cfg.n_realizations;
    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n);
    // Bounds the number of per-trajectory spectra held at once.
    const std::size_t chunk = std::max<std::size_t>(16, 4 * workers);

    EnsembleResult result;
    std::vector<std::vector<double>> sums(options.components.size());

    for (std::size_t begin = 0; begin < n; begin += chunk) {
        std::size_t end = std::min(n, begin + chunk);
        std::vector<Slot> slots(end - begin);
        std::atomic<std::size_t> next{begin};
        std::atomic<bool> failed{false};
        // Indices are claimed in order and a claimed index always runs, so every
        // index below a failure has run and the reported index is deterministic.
        auto work = [&] {
            while (!failed) {
                std::size_t i = next++;
                if (i >= end) {
                    break;
                }
                slots[i - begin] = run_one(cfg, options, i);
                if (slots[i - begin].failure) {
                    failed = true;
                }
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < std::min(workers, end - begin); ++w) {
                pool.emplace_back(work);
            }
        }

        for (auto &slot : slots) {
            if (slot.failure) {
                throw *slot.failure;
            }
        }
        for (auto &slot : slots) {
            for (std::size_t c = 0; c < sums.size(); ++c) {
                auto &spectrum = slot.spectra[c];
                if (result.spectra.size() <= c) {
                    spectrum.component = options.components[c];
                    result.spectra.push_back(spectrum);
                    sums[c].assign(spectrum.values.size(), 0.0);
                }
                for (std::size_t k = 0; k < sums[c].size(); ++k) {
                    sums[c][k] += spectrum.values[k];
                }
            }
            if (slot.trajectory) {
                result.trajectories.push_back(std::move(*slot.trajectory));
            }
        }
    }

    for (std::size_t c = 0; c < sums.size(); ++c) {
        for (std::size_t k = 0; k < sums[c].size(); ++k) {
            result.spectra[c].values[k] = sums[c][k] / static_cast<double>(n);
        }
        result.spectra[c].n_realizations = n;
    }
    return result;
}

std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::noise_intensity_d:
            return "noise_intensity_d";
        case SweepParameter::noise_tau:
            return "noise_tau";
        case SweepParameter::drive_f_ac:
            return "drive_f_ac";
        case SweepParameter::drive_omega_d:
            return "drive_omega_d";
    }
    return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view text) {
    for (auto p : {SweepParameter::noise_intensity_d, SweepParameter::noise_tau, SweepParameter::drive_f_ac,
                   SweepParameter::drive_omega_d}) {
        if (text == to_string(p)) {
            return p;
        }
    }
    if (text == "D") {
        return SweepParameter::noise_intensity_d;
    }
    if (text == "tau") {
        return SweepParameter::noise_tau;
    }
    return std::nullopt;
}

void SweepAxis::validate() const {
    if (values.empty()) {
        throw ConfigError(ConfigError::Kind::validation, "invalid sweep: axis has no values");
    }
    for (double v : values) {
        bool ok = std::isfinite(v);
        switch (parameter) {
            case SweepParameter::noise_intensity_d:
            case SweepParameter::noise_tau:
            case SweepParameter::drive_f_ac:
                ok = ok && v >= 0;
                break;
            case SweepParameter::drive_omega_d:
                ok = ok && v > 0;
                break;
        }
        if (!ok) {
            throw ConfigError(ConfigError::Kind::validation, "invalid sweep: value " + std::to_string(v) +
                                                                 " is outside the domain of " +
                                                                 std::string(to_string(parameter)));
        }
    }
}

SimulationConfig apply_axis(SimulationConfig cfg, SweepParameter parameter, double value) {
    switch (parameter) {
        case SweepParameter::noise_intensity_d:
            cfg.noise.intensity_d = value;
            break;
        case SweepParameter::noise_tau:
            cfg.noise.tau = value;
            break;
        case SweepParameter::drive_f_ac:
            cfg.drive.f_ac = value;
            break;
        case SweepParameter::drive_omega_d:
            cfg.drive.omega_d = value;
            break;
    }
    return cfg;
}

std::uint64_t sweep_point_seed(std::uint64_t master_seed, std::size_t axis_index) {
    return master_seed + kSweepSeedOffset * static_cast<std::uint64_t>(axis_index);
}

std::vector<SweepPoint> sweep(const EnsembleConfig &cfg, const SweepAxis &axis, const EnsembleOptions &options) {
    axis.validate();
    std::vector<SweepPoint> points;
    points.reserve(axis.values.size());
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
        SweepPoint point{axis.values[i], cfg, std::nullopt, {}};
        point.config.base = apply_axis(cfg.base, axis.parameter, axis.values[i]);
        point.config.master_seed = sweep_point_seed(cfg.master_seed, i);
        try {
            point.result = run_ensemble(point.config, options);
        } catch (const NumericOverflow &e) {
            point.error = e.what();
        } catch (const ConfigError &e) {
            point.error = e.what();
        }
        points.push_back(std::move(point));
    }
    return points;
}

}  // namespace fluxsr
