#pragma once

// Stochastic Bloch equations of a driven flux qubit in the energy eigenbasis:
//
//   dX/dt = -C Y - Gphi X              + (eps0/Om) Y xi(t)
//   dY/dt =  A Z + C X - Gphi Y        - ((Delta/Om) Z + (eps0/Om) X) xi(t)
//   dZ/dt = -A Y - Gr (Z - Zeq)        + (Delta/Om) Y xi(t)
//
// with xi = lambda * delta f_n.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fluxsr/core_model.hpp"
#include "fluxsr/noise.hpp"

namespace fluxsr {

enum class Stepper { ito_euler, heun_stratonovich };

std::string_view to_string(Stepper s);
std::optional<Stepper> parse_stepper(std::string_view text);

/// Recorded samples per trajectory with the default run settings.
inline constexpr std::size_t kDefaultRecordLength = std::size_t{1} << 16;

/// Upper bound on |s| before a trajectory is declared unstable.
inline constexpr double kNormBound = 10.0;

/// Bound on |s| - 1 along Heun trajectories with damping while 2 lambda^2 D dt <= 0.004
/// (D <= 1e-5 at the default dt and lambda). Closer to the stability limit the
/// bound is not guaranteed; reduce dt there.
inline constexpr double kNormDriftTolerance = 0.01;

/// Largest 2 lambda^2 D dt accepted by validation.
inline constexpr double kStabilityLimit = 0.1;

struct SimulationConfig {
    QubitParams qubit;
    DrivePlan drive;
    NoiseSpec noise;
    double dt = 0.005;
    double t_transient = 100.0;
    double t_total = 100.0 + kDefaultRecordLength * 2 * 0.005;
    std::size_t record_stride = 2;
    /// Unset means the thermal state (0, 0, Z_eq).
    std::optional<BlochState> initial_state;
    Stepper stepper = Stepper::heun_stratonovich;

    void validate() const;

    double bias() const { return bias_from_flux(qubit, drive.f_dc); }
    double splitting() const { return interlevel_splitting(qubit, bias()); }
    BlochState resolved_initial_state() const;

    std::size_t total_steps() const;
    std::size_t transient_steps() const;
    /// Number of samples recorded on [t_transient, t_total).
    std::size_t record_length() const;
    double sample_interval() const { return dt * static_cast<double>(record_stride); }
};

/// Deterministic part of the equations at fixed parameters, with Omega,
/// Z_eq and the basis ratios cached.
class BlochModel {
   public:
    BlochModel(const QubitParams &q, const DrivePlan &d);

    BlochState drift(const BlochState &s, double t) const;
    BlochState noise_generator(const BlochState &s) const;

    double splitting() const { return omega_; }
    double bias() const { return eps0_; }
    double equilibrium() const { return z_eq_; }

   private:
    QubitParams qubit_;
    DrivePlan drive_;
    double eps0_;
    double omega_;
    double sin_ratio_;  // Delta / Omega
    double cos_ratio_;  // eps0 / Omega
    double z_eq_;
};

BlochState drift(const BlochState &s, double t, const QubitParams &q, const DrivePlan &d);

/// g(s) = ((eps0/Om) Y, -(Delta/Om) Z - (eps0/Om) X, (Delta/Om) Y); s . g(s) = 0.
BlochState noise_generator(const BlochState &s, const QubitParams &q, double eps0);

/// Euler-Maruyama: s + drift(s, t) dt + g(s) dW, where dW = lambda * integral of delta f_n.
BlochState em_step(const BlochState &s, double t, double dt, double dW, const BlochModel &model);
BlochState em_step(const BlochState &s, double t, double dt, double dW, const SimulationConfig &cfg);

/// Heun predictor-corrector; converges to the Stratonovich solution.
BlochState heun_step(const BlochState &s, double t, double dt, double dW, const BlochModel &model);
BlochState heun_step(const BlochState &s, double t, double dt, double dW, const SimulationConfig &cfg);

struct Trajectory {
    std::vector<double> times;
    std::vector<BlochState> states;
    std::uint64_t seed = 0;
    /// Circulating current I / I_p = current_x * X + current_z * Z.
    double current_x = 1.0;
    double current_z = 0.0;
};

/// Integrates one noise realization drawn from RngStream(seed). Throws
/// NumericOverflow once |s| exceeds kNormBound.
Trajectory simulate_trajectory(const SimulationConfig &cfg, std::uint64_t seed);

}  // namespace fluxsr
