#include "fluxsr/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void require_positive_dt(double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: dt must be > 0");
    }
}

// 2x - 3 + 4e^{-x} - e^{-2x}, accurate for small x where the closed form cancels.
double integrated_ou_variance_factor(double x) {
    if (x >= 0.5) {
        double a = std::exp(-x);
        return 2 * x - 3 + 4 * a - a * a;
    }
    double sum = 0.0;
    double term = x * x / 2;  // x^n / n!, starts at n = 2
    for (int n = 3; n <= 30; ++n) {
        term *= x / n;
        double coeff = 4.0 - std::ldexp(1.0, n);
        sum += (n % 2 == 0 ? coeff : -coeff) * term;
    }
    return sum;
}

}  // namespace

void NoiseSpec::validate() const {
    if (!(intensity_d >= 0) || !std::isfinite(intensity_d)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: noise.intensity_d must be >= 0");
    }
    if (!(tau >= 0) || !std::isfinite(tau)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: noise.tau must be >= 0");
    }
    if (!(coupling_lambda > 0) || !std::isfinite(coupling_lambda)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: noise.coupling_lambda must be > 0");
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(mix64(master_seed) ^ (index * kGolden + kGolden));
}

double white_increment(const NoiseSpec &spec, double dt, RngStream &stream) {
    require_positive_dt(dt);
    if (spec.intensity_d == 0) {
        return 0.0;
    }
    return std::sqrt(2 * spec.intensity_d * dt) * stream.gaussian();
}

NoisePathState ou_init(const NoiseSpec &spec, RngStream stream) {
    if (!(spec.tau > 0)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: OU noise requires tau > 0");
    }
    double value = 0.0;
    if (spec.intensity_d > 0) {
        value = std::sqrt(spec.intensity_d / spec.tau) * stream.gaussian();
    }
    return {value, std::move(stream)};
}

NoisePathState ou_step(NoisePathState state, const NoiseSpec &spec, double dt) {
    require_positive_dt(dt);
    if (!(spec.tau > 0)) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: OU noise requires tau > 0");
    }
    double decay = std::exp(-dt / spec.tau);
    state.current_value *= decay;
    if (spec.intensity_d > 0) {
        double sd = std::sqrt(-(spec.intensity_d / spec.tau) * std::expm1(-2 * dt / spec.tau));
        state.current_value += sd * state.stream.gaussian();
    }
    return state;
}

NoiseSource::NoiseSource(const NoiseSpec &spec, double dt, RngStream stream)
    : white_(spec.white()), stream_(std::move(stream)) {
    require_positive_dt(dt);
    if (white_) {
        white_scale_ = std::sqrt(2 * spec.intensity_d * dt);
        return;
    }
    NoisePathState init = ou_init(spec, std::move(stream_));
    value_ = init.current_value;
    stream_ = std::move(init.stream);

    double x = dt / spec.tau;
    double variance = spec.intensity_d / spec.tau;
    double one_minus_decay = -std::expm1(-x);
    decay_ = 1 - one_minus_decay;
    mean_gain_ = spec.tau * one_minus_decay;
    if (spec.intensity_d == 0) {
        return;
    }
    double var_value = -variance * std::expm1(-2 * x);
    double var_integral = variance * spec.tau * spec.tau * integrated_ou_variance_factor(x);
    double covariance = variance * spec.tau * one_minus_decay * one_minus_decay;
    value_sd_ = std::sqrt(var_value);
    cross_gain_ = covariance / value_sd_;
    residual_sd_ = std::sqrt(std::max(0.0, var_integral - cross_gain_ * cross_gain_));
}

double NoiseSource::next() {
    if (white_) {
        return white_scale_ == 0 ? 0.0 : white_scale_ * stream_.gaussian();
    }
    double integral = mean_gain_ * value_;
    value_ *= decay_;
    if (value_sd_ > 0) {
        double innovation = stream_.gaussian();
        double residual = stream_.gaussian();
        value_ += value_sd_ * innovation;
        integral += cross_gain_ * innovation + residual_sd_ * residual;
    }
    return integral;
}

std::vector<double> noise_path(const NoiseSpec &spec, std::size_t n_steps, double dt, RngStream stream) {
    if (n_steps < 1) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: n_steps must be >= 1");
    }
    NoiseSource source(spec, dt, std::move(stream));
    std::vector<double> out(n_steps);
    for (auto &v : out) {
        v = source.next();
    }
    return out;
}

}  // namespace fluxsr
