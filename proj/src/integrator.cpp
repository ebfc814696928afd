#include "fluxsr/integrator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: " + what);
    }
}

}  // namespace

std::string_view to_string(Stepper s) {
    switch (s) {
        case Stepper::ito_euler:
            return "ito";
        case Stepper::heun_stratonovich:
            return "heun";
    }
    return "?";
}

std::optional<Stepper> parse_stepper(std::string_view text) {
    if (text == "ito" || text == "ito_euler") {
        return Stepper::ito_euler;
    }
    if (text == "heun" || text == "heun_stratonovich") {
        return Stepper::heun_stratonovich;
    }
    return std::nullopt;
}

void SimulationConfig::validate() const {
    qubit.validate();
    drive.validate();
    noise.validate();
    require(std::isfinite(dt) && dt > 0, "run.dt must be > 0");
    require(std::isfinite(t_transient) && t_transient >= 0, "run.t_transient must be >= 0");
    require(std::isfinite(t_total) && t_transient < t_total, "run.t_transient must be < run.t_total");
    require(record_stride >= 1, "run.record_stride must be >= 1");
    require(record_length() >= 2, "the recorded window must hold at least 2 samples");

    double nyquist = std::numbers::pi / sample_interval();
    if (!(nyquist > splitting())) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "Nyquist frequency pi/(dt*record_stride) = " << nyquist << " must exceed the splitting Omega = "
            << splitting();
        require(false, msg.str());
    }

    double lambda = noise.coupling_lambda;
    double kick = 2 * lambda * lambda * noise.intensity_d * dt;
    if (kick > kStabilityLimit) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "stability guard: 2*lambda^2*D*dt = " << kick << " exceeds " << kStabilityLimit
            << "; use dt < " << kStabilityLimit / (2 * lambda * lambda * noise.intensity_d);
        throw ConfigError(ConfigError::Kind::stability_guard, msg.str());
    }

    if (initial_state) {
        const BlochState &s = *initial_state;
        require(std::isfinite(s.norm2()) && std::sqrt(s.norm2()) <= 1 + kStateTolerance,
                "run.initial_state must lie inside the Bloch ball");
    }
}

BlochState SimulationConfig::resolved_initial_state() const {
    if (initial_state) {
        return *initial_state;
    }
    return {0.0, 0.0, equilibrium_z(splitting(), qubit.temperature)};
}

std::size_t SimulationConfig::total_steps() const { return static_cast<std::size_t>(std::llround(t_total / dt)); }

std::size_t SimulationConfig::transient_steps() const {
    return static_cast<std::size_t>(std::llround(t_transient / dt));
}

std::size_t SimulationConfig::record_length() const {
    std::size_t total = total_steps();
    std::size_t transient = transient_steps();
    if (transient >= total || record_stride == 0) {
        return 0;
    }
    return (total - transient + record_stride - 1) / record_stride;
}

BlochModel::BlochModel(const QubitParams &q, const DrivePlan &d)
    : qubit_(q),
      drive_(d),
      eps0_(bias_from_flux(q, d.f_dc)),
      omega_(interlevel_splitting(q, eps0_)),
      sin_ratio_(q.delta / omega_),
      cos_ratio_(eps0_ / omega_),
      z_eq_(equilibrium_z(omega_, q.temperature)) {}

BlochState BlochModel::drift(const BlochState &s, double t) const {
    double eps1 = drive_energy(qubit_, drive_, t);
    double a = -eps1 * sin_ratio_;
    double c = -omega_ - eps1 * cos_ratio_;
    return {
        -c * s.y - qubit_.gamma_phi * s.x,
        a * s.z + c * s.x - qubit_.gamma_phi * s.y,
        -a * s.y - qubit_.gamma_r * (s.z - z_eq_),
    };
}

BlochState BlochModel::noise_generator(const BlochState &s) const {
    return {cos_ratio_ * s.y, -sin_ratio_ * s.z - cos_ratio_ * s.x, sin_ratio_ * s.y};
}

BlochState drift(const BlochState &s, double t, const QubitParams &q, const DrivePlan &d) {
    return BlochModel(q, d).drift(s, t);
}

BlochState noise_generator(const BlochState &s, const QubitParams &q, double eps0) {
    double omega = interlevel_splitting(q, eps0);
    double sin_ratio = q.delta / omega;
    double cos_ratio = eps0 / omega;
    return {cos_ratio * s.y, -sin_ratio * s.z - cos_ratio * s.x, sin_ratio * s.y};
}

BlochState em_step(const BlochState &s, double t, double dt, double dW, const BlochModel &model) {
    return s + dt * model.drift(s, t) + dW * model.noise_generator(s);
}

BlochState em_step(const BlochState &s, double t, double dt, double dW, const SimulationConfig &cfg) {
    return em_step(s, t, dt, dW, BlochModel(cfg.qubit, cfg.drive));
}

BlochState heun_step(const BlochState &s, double t, double dt, double dW, const BlochModel &model) {
    BlochState f0 = model.drift(s, t);
    BlochState g0 = model.noise_generator(s);
    BlochState predicted = s + dt * f0 + dW * g0;
    BlochState f1 = model.drift(predicted, t + dt);
    BlochState g1 = model.noise_generator(predicted);
    return s + (0.5 * dt) * (f0 + f1) + (0.5 * dW) * (g0 + g1);
}

BlochState heun_step(const BlochState &s, double t, double dt, double dW, const SimulationConfig &cfg) {
    return heun_step(s, t, dt, dW, BlochModel(cfg.qubit, cfg.drive));
}

namespace {

template <typename Step>
Trajectory integrate(const SimulationConfig &cfg, std::uint64_t seed, Step step) {
    BlochModel model(cfg.qubit, cfg.drive);
    NoiseSource noise(cfg.noise, cfg.dt, RngStream(seed));
    const double lambda = cfg.noise.coupling_lambda;
    const double bound2 = kNormBound * kNormBound;
    const std::size_t total = cfg.total_steps();
    const std::size_t first = cfg.transient_steps();
    const std::size_t stride = cfg.record_stride;

    Trajectory traj;
    traj.seed = seed;
    traj.current_x = cfg.qubit.delta / model.splitting();
    traj.current_z = -model.bias() / model.splitting();
    traj.times.reserve(cfg.record_length());
    traj.states.reserve(cfg.record_length());

    BlochState s = cfg.resolved_initial_state();
    for (std::size_t k = 0; k < total; ++k) {
        double t = static_cast<double>(k) * cfg.dt;
        if (k >= first && (k - first) % stride == 0) {
            traj.times.push_back(t);
            traj.states.push_back(s);
        }
        double dW = lambda * noise.next();
        s = step(s, t, cfg.dt, dW, model);
        double n2 = s.norm2();
        if (!(n2 <= bound2)) {
            throw NumericOverflow(t + cfg.dt, std::sqrt(n2));
        }
    }
    return traj;
}

}  // namespace

Trajectory simulate_trajectory(const SimulationConfig &cfg, std::uint64_t seed) {
    cfg.validate();
    if (cfg.stepper == Stepper::ito_euler) {
        return integrate(cfg, seed, [](const BlochState &s, double t, double dt, double dW, const BlochModel &m) {
            return em_step(s, t, dt, dW, m);
        });
    }
    return integrate(cfg, seed, [](const BlochState &s, double t, double dt, double dW, const BlochModel &m) {
        return heun_step(s, t, dt, dW, m);
    });
}

}  // namespace fluxsr
