#pragma once

// Classical flux noise delta f_n(t): Gaussian white noise with
// <f(t) f(t')> = 2D delta(t - t'), or the stationary Ornstein-Uhlenbeck process
// df/dt = -f/tau + zeta/tau driven by white zeta of the same intensity D.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fluxsr {

struct NoiseSpec {
    double intensity_d = 0.0;        ///< D, ns
    double tau = 0.0;                ///< correlation time, ns; 0 selects white noise
    double coupling_lambda = 200.0;  ///< delta xi = lambda * delta f_n

    bool white() const { return tau == 0; }
    void validate() const;
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Seed of trajectory `index` in an ensemble: mix64(mix64(master) ^ (index * golden + golden)),
/// golden = 0x9E3779B97F4A7C15. Depends only on (master, index), never on scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Deterministic Gaussian stream. One stream is owned by exactly one noise path.
class RngStream {
   public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    std::uint64_t seed() const { return seed_; }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// One-step integral of white noise over dt: N(0, 2 D dt).
double white_increment(const NoiseSpec &spec, double dt, RngStream &stream);

struct NoisePathState {
    double current_value;
    RngStream stream;
};

/// Draws the OU value from its stationary law N(0, D/tau).
NoisePathState ou_init(const NoiseSpec &spec, RngStream stream);

/// Exact transition f' = f e^{-dt/tau} + sqrt((D/tau)(1 - e^{-2dt/tau})) N(0,1).
NoisePathState ou_step(NoisePathState state, const NoiseSpec &spec, double dt);

/// Per-step noise integrals I_k = integral of delta f_n over [k dt, (k+1) dt].
///
/// White noise yields independent N(0, 2 D dt) draws. For OU noise the pair
/// (f(t + dt), I) is sampled from its exact joint Gaussian law given f(t), so
/// the increments are unbiased for any ratio dt / tau and converge to the
/// white-noise increments as tau -> 0.
class NoiseSource {
   public:
    NoiseSource(const NoiseSpec &spec, double dt, RngStream stream);

    double next();

    /// OU value at the start of the next step; zero for white noise.
    double current_value() const { return value_; }

   private:
    bool white_;
    double value_ = 0.0;
    double white_scale_ = 0.0;
    double decay_ = 0.0;         // e^{-dt/tau}
    double value_sd_ = 0.0;      // conditional sd of f(t + dt)
    double mean_gain_ = 0.0;     // E[I | f] = mean_gain_ * f
    double cross_gain_ = 0.0;    // projection of I on the f innovation
    double residual_sd_ = 0.0;   // sd of I after the projection
    RngStream stream_;
};

/// Equivalent to n_steps successive NoiseSource::next() calls on the same stream.
std::vector<double> noise_path(const NoiseSpec &spec, std::size_t n_steps, double dt, RngStream stream);

}  // namespace fluxsr
