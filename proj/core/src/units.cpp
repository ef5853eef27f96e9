#include "zitter/units.hpp"

#include <cmath>
#include <string>

#include "zitter/errors.hpp"

namespace zitter {

UnitSystem::UnitSystem(double rest_energy, double length, double time, UnitMode mode)
    : rest_energy_(rest_energy), compton_length_(length), compton_time_(time), mode_(mode) {
    if (!(rest_energy > 0.0) || !(length > 0.0) || !(time > 0.0))
        throw ConfigError("unit scales must be strictly positive");
}

UnitSystem UnitSystem::physical_electron() {
    const double mc2 = si::electron_mass * si::speed_of_light * si::speed_of_light;
    return UnitSystem(mc2, si::hbar * si::speed_of_light / mc2, si::hbar / mc2,
                      UnitMode::physical_electron);
}

UnitSystem UnitSystem::simulated(double speed, double rest_energy) {
    if (!(speed > 0.0) || !(rest_energy > 0.0))
        throw ConfigError("simulated speed and rest energy must be positive");
    const double t = si::hbar / rest_energy;
    return UnitSystem(rest_energy, speed * t, t, UnitMode::simulated);
}

FieldConfig::FieldConfig(double magnetic_length, std::optional<double> tesla)
    : magnetic_length_(magnetic_length), tesla_(tesla) {
    if (!(magnetic_length > 0.0) || !std::isfinite(magnetic_length))
        throw ConfigError("magnetic length must be positive and finite, got " +
                          std::to_string(magnetic_length));
    omega_ = std::sqrt(2.0) / magnetic_length;
    omega_cyclotron_ = 1.0 / (magnetic_length * magnetic_length);
}

FieldConfig FieldConfig::from_magnetic_length(double magnetic_length) {
    return FieldConfig(magnetic_length, std::nullopt);
}

FieldConfig FieldConfig::from_kappa(double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    return FieldConfig(1.0 / std::sqrt(2.0 * kappa), std::nullopt);
}

FieldConfig FieldConfig::from_tesla(double tesla) {
    if (!(tesla > 0.0)) throw ConfigError("field strength must be positive");
    const auto units = UnitSystem::physical_electron();
    const double metres = std::sqrt(si::hbar / (si::elementary_charge * tesla));
    return FieldConfig(units.length_from_si(metres), tesla);
}

}  // namespace zitter
