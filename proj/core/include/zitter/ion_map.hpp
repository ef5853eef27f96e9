#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "zitter/packet.hpp"
#include "zitter/units.hpp"

// Correspondence between a trapped-ion simulation and the Dirac parameters:
// c <-> 2 eta Delta Omega~, mc^2 <-> hbar Omega, L <-> sqrt(2) Delta.
// Frequencies are angular (rad/s), lengths in metres, masses in kg.

namespace zitter {

struct TrapParams {
    double eta = 0.0;            // Lamb-Dicke parameter
    double omega_tilde = 0.0;    // sideband coupling
    double omega_carrier = 0.0;  // carrier coupling, the simulated gap
    std::optional<double> delta;      // ground-state spread
    std::optional<double> ion_mass;
    std::optional<std::array<double, 3>> trap_freqs;  // nu_x, nu_y, nu_z

    void validate() const;
};

inline constexpr double two_pi = 6.283185307179586476925286766559;

constexpr double angular_from_hertz(double hertz) noexcept { return two_pi * hertz; }

// sqrt(hbar / (2 M nu))
double ground_state_spread(double ion_mass, double nu);

struct SimulatedSystem {
    UnitSystem units;
    FieldConfig field;
    double delta = 0.0;                // resolved spread used for L
    double magnetic_length_si = 0.0;   // sqrt(2) Delta
    bool isotropic = true;             // Delta_x = Delta_y = Delta_z
    std::vector<std::string> warnings;
};

SimulatedSystem simulated_units(const TrapParams& trap);

// (eta Omega~ / Omega)^2
double kappa(const TrapParams& trap);

// Omega = eta Omega~ / sqrt(kappa)
double invert_kappa(double target_kappa, double eta, double omega_tilde);

enum class InteractionKind { sigma_momentum, jaynes_cummings, anti_jaynes_cummings, carrier };

std::string_view to_string(InteractionKind kind) noexcept;

struct Interaction {
    InteractionKind kind = InteractionKind::carrier;
    std::string term;          // simulated Hamiltonian term
    char axis = 'x';           // trap axis; carrier terms carry '-'
    std::string levels;        // ion levels coupled, e.g. "ad"
    int sign = 1;
    std::optional<double> phase_red;
    std::optional<double> phase_blue;
    std::optional<double> phase_carrier;
    int laser_pairs = 1;
};

struct ExcitationSchedule {
    Model model = Model::spatial;
    std::vector<Interaction> interactions;
    // the schedule realizes the off-diagonal representation reached by
    // P = delta (delta + beta) / sqrt 2, delta = alpha_x alpha_y alpha_z beta
    std::string representation = "off-diagonal";

    int laser_pairs() const noexcept;
};

ExcitationSchedule excitation_schedule(Model model);

}  // namespace zitter
