#pragma once

#include <optional>

// Natural units hbar = m = c = 1 are used everywhere inside the library:
// lengths in Compton wavelengths, times in Compton times, energies in mc^2.
// UnitSystem carries the SI size of those three scales so results can be
// converted at the boundary.

namespace zitter {

namespace si {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double speed_of_light = 299792458.0;    // m/s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double angstrom = 1e-10;                // m
}  // namespace si

enum class UnitMode { physical_electron, simulated };

class UnitSystem {
public:
    static UnitSystem physical_electron();
    // speed in m/s, rest energy in J.
    static UnitSystem simulated(double speed, double rest_energy);

    double rest_energy() const noexcept { return rest_energy_; }
    double compton_length() const noexcept { return compton_length_; }
    double compton_time() const noexcept { return compton_time_; }
    double speed() const noexcept { return compton_length_ / compton_time_; }
    UnitMode mode() const noexcept { return mode_; }

    double length_to_si(double natural) const noexcept { return natural * compton_length_; }
    double length_from_si(double metres) const noexcept { return metres / compton_length_; }
    double time_to_si(double natural) const noexcept { return natural * compton_time_; }
    double frequency_to_si(double natural) const noexcept { return natural / compton_time_; }

private:
    UnitSystem(double rest_energy, double length, double time, UnitMode mode);

    double rest_energy_;
    double compton_length_;
    double compton_time_;
    UnitMode mode_;
};

// Field scales in natural units. omega is the Landau ladder frequency
// sqrt(2) c / L, omega_cyclotron = hbar / (m L^2).
class FieldConfig {
public:
    // magnetic length L in Compton wavelengths
    static FieldConfig from_magnetic_length(double magnetic_length);
    static FieldConfig from_kappa(double kappa);
    // B in tesla; only meaningful for the physical electron
    static FieldConfig from_tesla(double tesla);

    double magnetic_length() const noexcept { return magnetic_length_; }
    std::optional<double> field_strength() const noexcept { return tesla_; }
    double omega() const noexcept { return omega_; }
    double omega_cyclotron() const noexcept { return omega_cyclotron_; }
    // hbar omega_c / (2 m c^2)
    double kappa() const noexcept { return 0.5 * omega_cyclotron_; }

private:
    FieldConfig(double magnetic_length, std::optional<double> tesla);

    double magnetic_length_;
    std::optional<double> tesla_;
    double omega_;
    double omega_cyclotron_;
};

}  // namespace zitter
