#include "fluxsr/core_model.hpp"

#include <cmath>
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

NumericOverflow::NumericOverflow(double time, double norm, std::optional<std::size_t> trajectory_index)
    : Error("numeric overflow: Bloch vector norm " + std::to_string(norm) + " at t = " + std::to_string(time) +
            " ns" + (trajectory_index ? " in trajectory " + std::to_string(*trajectory_index) : std::string{}) +
            "; reduce dt"),
      time_(time),
      norm_(norm),
      trajectory_index_(trajectory_index) {}

void QubitParams::validate() const {
    require(std::isfinite(delta) && delta > 0, "qubit.delta must be > 0");
    require(std::isfinite(ip_phi0) && ip_phi0 > 0, "qubit.ip_phi0 must be > 0");
    require(std::isfinite(gamma_phi) && gamma_phi >= 0, "qubit.gamma_phi must be >= 0");
    require(std::isfinite(gamma_r) && gamma_r >= 0, "qubit.gamma_r must be >= 0");
    require(temperature >= 0 && !std::isnan(temperature), "qubit.temperature must be >= 0");
}

void DrivePlan::validate() const {
    require(std::isfinite(f_dc), "drive.f_dc must be finite");
    require(std::isfinite(f_ac) && f_ac >= 0, "drive.f_ac must be >= 0");
    require(f_ac == 0 || (std::isfinite(omega_d) && omega_d > 0), "drive.omega_d must be > 0 when f_ac > 0");
}

double interlevel_splitting(const QubitParams &q, double eps0) { return std::hypot(eps0, q.delta); }

double bias_from_flux(const QubitParams &q, double f_dc) { return q.ip_phi0 * (f_dc - 0.5); }

double drive_energy(const QubitParams &q, const DrivePlan &d, double t) {
    if (d.f_ac == 0) {
        return 0.0;
    }
    return q.ip_phi0 * d.f_ac * std::sin(d.omega_d * t);
}

DriveCoefficients drive_coefficients(const QubitParams &q, const DrivePlan &d, double t) {
    double eps0 = bias_from_flux(q, d.f_dc);
    double omega = interlevel_splitting(q, eps0);
    double eps1 = drive_energy(q, d, t);
    return {-eps1 * q.delta / omega, -omega - eps1 * eps0 / omega};
}

double equilibrium_z(double omega, double temperature) {
    if (temperature == 0) {
        return 1.0;
    }
    return std::tanh(omega / (2 * temperature));
}

Occupations occupation_probabilities(const BlochState &s) {
    if (!(std::abs(s.z) <= 1 + kStateTolerance)) {
        throw InvalidState("invalid state: |z| = " + std::to_string(std::abs(s.z)) + " exceeds 1");
    }
    double upper = 0.5 * (1 - s.z);
    return {upper, 1 - upper};
}

double circulating_current(const QubitParams &q, double eps0, const BlochState &s) {
    double omega = interlevel_splitting(q, eps0);
    return (q.delta / omega) * s.x - (eps0 / omega) * s.z;
}

double rabi_frequency(const QubitParams &q, const DrivePlan &d) {
    double omega = interlevel_splitting(q, bias_from_flux(q, d.f_dc));
    return 0.5 * q.ip_phi0 * d.f_ac * q.delta / omega;
}

}  // namespace fluxsr
