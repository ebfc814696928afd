#pragma once

// Static parameters and closed-form quantities of a flux qubit.
//
// Units: hbar = 1. Energies and rates are angular frequencies in ns^-1
// (quoted as "GHz"), times are in ns.

#include <cmath>

namespace fluxsr {

struct QubitParams {
    double ip_phi0 = 200.0;  ///< I_p * Phi_0, converts reduced flux to energy
    double delta = 1.4;      ///< tunneling splitting
    double gamma_phi = 0.1;  ///< intrinsic dephasing rate
    double gamma_r = 0.1;    ///< intrinsic relaxation rate
    double temperature = 0.0;

    /// Throws ConfigError(validation) naming the violated bound.
    void validate() const;
};

/// Flux bias and harmonic drive, both in reduced flux units f = Phi_e / Phi_0.
struct DrivePlan {
    double f_dc = 0.5;
    double f_ac = 0.0;
    double omega_d = 0.0;

    void validate() const;
};

/// Pauli vector of the density matrix in the eigenbasis of the static Hamiltonian.
struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
    double dot(const BlochState &o) const { return x * o.x + y * o.y + z * o.z; }

    BlochState &operator+=(const BlochState &o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    friend BlochState operator+(BlochState a, const BlochState &b) { return a += b; }
    friend BlochState operator-(const BlochState &a, const BlochState &b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend BlochState operator*(double k, const BlochState &s) { return {k * s.x, k * s.y, k * s.z}; }
    friend bool operator==(const BlochState &, const BlochState &) = default;
};

/// Omega = sqrt(eps0^2 + delta^2).
double interlevel_splitting(const QubitParams &q, double eps0);

/// eps0 = I_p Phi_0 (f_dc - 1/2).
double bias_from_flux(const QubitParams &q, double f_dc);

/// Drive amplitude in energy units, eps1(t) = I_p Phi_0 f_ac sin(omega_d t).
double drive_energy(const QubitParams &q, const DrivePlan &d, double t);

struct DriveCoefficients {
    double a;
    double c;
};

/// A = -eps1 Delta / Omega, C = -Omega - eps1 eps0 / Omega.
DriveCoefficients drive_coefficients(const QubitParams &q, const DrivePlan &d, double t);

/// tanh(Omega / 2T); exactly 1 at T = 0.
double equilibrium_z(double omega, double temperature);

struct Occupations {
    double upper;
    double lower;
};

/// Tolerance on |z| - 1 accepted before a state is called unphysical.
inline constexpr double kStateTolerance = 1e-9;

/// P_upper = (1 - z)/2, P_lower = (1 + z)/2. Throws InvalidState for |z| > 1 + tol.
Occupations occupation_probabilities(const BlochState &s);

/// Circulating current in units of I_p: (Delta/Omega) x - (eps0/Omega) z.
double circulating_current(const QubitParams &q, double eps0, const BlochState &s);

/// Rabi frequency of a resonant drive under the rotating-wave approximation:
/// half the transverse drive amplitude I_p Phi_0 f_ac Delta / Omega.
double rabi_frequency(const QubitParams &q, const DrivePlan &d);

}  // namespace fluxsr
