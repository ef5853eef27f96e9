#include "zitter/ion_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "zitter/errors.hpp"

namespace zitter {

namespace {

constexpr double consistency_tolerance = 1e-6;

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void TrapParams::validate() const {
    if (!positive(eta)) throw ConfigError("trap.eta must be positive");
    if (!positive(omega_tilde)) throw ConfigError("trap.omega_tilde must be positive");
    if (!positive(omega_carrier)) throw ConfigError("trap.omega_carrier must be positive");
    if (delta && !positive(*delta)) throw ConfigError("trap.delta must be positive");
    if (ion_mass && !positive(*ion_mass)) throw ConfigError("trap.ion_mass must be positive");
    if (trap_freqs)
        for (double nu : *trap_freqs)
            if (!positive(nu)) throw ConfigError("trap.trap_freqs entries must be positive");
    if (!delta && !(ion_mass && trap_freqs))
        throw ConfigError("trap needs either delta or both ion_mass and trap_freqs");
}

double ground_state_spread(double ion_mass, double nu) {
    if (!positive(ion_mass) || !positive(nu))
        throw ConfigError("ion mass and trap frequency must be positive");
    return std::sqrt(si::hbar / (2.0 * ion_mass * nu));
}

double kappa(const TrapParams& trap) {
    trap.validate();
    const double r = trap.eta * trap.omega_tilde / trap.omega_carrier;
    return r * r;
}

double invert_kappa(double target_kappa, double eta, double omega_tilde) {
    if (!positive(target_kappa)) throw ConfigError("target kappa must be positive");
    if (!positive(eta) || !positive(omega_tilde))
        throw ConfigError("eta and omega_tilde must be positive");
    return eta * omega_tilde / std::sqrt(target_kappa);
}

SimulatedSystem simulated_units(const TrapParams& trap) {
    trap.validate();
    std::vector<std::string> warnings;
    bool isotropic = true;
    std::optional<double> derived;
    if (trap.ion_mass && trap.trap_freqs) {
        const auto& nu = *trap.trap_freqs;
        std::array<double, 3> spread{};
        for (std::size_t q = 0; q < 3; ++q) spread[q] = ground_state_spread(*trap.ion_mass, nu[q]);
        const auto [lo, hi] = std::minmax_element(spread.begin(), spread.end());
        isotropic = (*hi - *lo) <= 1e-9 * *hi;
        if (!isotropic)
            warnings.push_back("trap is anisotropic: Delta_x, Delta_y, Delta_z differ; the mapping "
                               "uses Delta_y");
        derived = spread[1];
    }
    double delta = 0.0;
    if (trap.delta) {
        delta = *trap.delta;
        if (derived && std::abs(*derived - delta) > consistency_tolerance * delta)
            warnings.push_back("explicit delta " + std::to_string(delta) +
                               " m disagrees with sqrt(hbar/2 M nu) = " + std::to_string(*derived) +
                               " m; using the explicit value");
    } else {
        delta = *derived;
    }
    const double speed = 2.0 * trap.eta * delta * trap.omega_tilde;
    const double rest_energy = si::hbar * trap.omega_carrier;
    const auto units = UnitSystem::simulated(speed, rest_energy);
    const double L = std::numbers::sqrt2 * delta;
    return {units, FieldConfig::from_magnetic_length(units.length_from_si(L)), delta, L, isotropic,
            std::move(warnings)};
}

std::string_view to_string(InteractionKind kind) noexcept {
    switch (kind) {
        case InteractionKind::sigma_momentum: return "sigma-p coupling";
        case InteractionKind::jaynes_cummings: return "JC";
        case InteractionKind::anti_jaynes_cummings: return "AJC";
        case InteractionKind::carrier: return "carrier";
    }
    return "unknown";
}

int ExcitationSchedule::laser_pairs() const noexcept {
    return std::accumulate(interactions.begin(), interactions.end(), 0,
                           [](int acc, const Interaction& i) { return acc + i.laser_pairs; });
}

ExcitationSchedule excitation_schedule(Model model) {
    using std::numbers::pi;
    auto momentum = [&](const char* term, char axis, const char* levels, int sign) {
        // a JC/AJC pair with phi_r = -pi/2, phi_b = +pi/2 gives sigma_x p_q
        return Interaction{InteractionKind::sigma_momentum, term, axis, levels, sign, -pi / 2,
                           pi / 2, std::nullopt, 2};
    };
    auto carrier = [&](const char* levels) {
        // sigma+ e^{i phi} + h.c. = sigma_x cos phi - sigma_y sin phi
        return Interaction{InteractionKind::carrier, "mc^2 sigma_y", '-', levels, 1, std::nullopt,
                           std::nullopt, -pi / 2, 1};
    };
    ExcitationSchedule s;
    s.model = model;
    s.interactions.push_back(momentum("c p_x sigma_x", 'x', "ad", 1));
    s.interactions.push_back(momentum("c p_x sigma_x", 'x', "bc", 1));
    s.interactions.push_back({InteractionKind::jaynes_cummings, "-hbar omega a_y", 'y', "ad", 1, pi,
                              std::nullopt, std::nullopt, 1});
    s.interactions.push_back({InteractionKind::anti_jaynes_cummings, "-hbar omega a_y^dagger", 'y',
                              "bc", 1, std::nullopt, pi, std::nullopt, 1});
    if (model == Model::spatial) {
        s.interactions.push_back(momentum("c p_z sigma_x", 'z', "ac", 1));
        s.interactions.push_back(momentum("c p_z sigma_x", 'z', "bd", -1));
    }
    s.interactions.push_back(carrier("ac"));
    s.interactions.push_back(carrier("bd"));
    return s;
}

}  // namespace zitter
