#pragma once

#include <array>
#include <complex>

#include "zitter/units.hpp"

// Landau spectrum and Johnson-Lippman eigenstates of the Dirac Hamiltonian
// in the gauge A = (-By, 0, 0). Natural units throughout.

namespace zitter {

struct LandauIndex {
    int n = 0;
    double k_x = 0.0;
    double k_z = 0.0;
    int epsilon = 1;  // energy branch
    int s = -1;       // spin label

    void validate() const;
};

// Four real amplitudes of a Johnson-Lippman spinor. Component j lives on
// oscillator level levels()[j]; amplitudes attached to level -1 are zero.
struct SpinorWeights {
    int n = 0;
    std::array<double, 4> components{};
    double norm_constant = 0.0;
    double chi = 0.0;
    double eta = 0.0;

    std::array<int, 4> levels() const noexcept { return {n - 1, n, n - 1, n}; }
};

double landau_energy(int n, double k_z, const FieldConfig& field);

// E_{n+1} - E_n without cancellation.
double landau_gap(int n, double k_z, const FieldConfig& field);

struct ModeFrequencies {
    double cyclotron;  // (E_{n+1} - E_n) / hbar
    double zitter;     // (E_{n+1} + E_n) / hbar
};

ModeFrequencies mode_frequencies(int n, double k_z, const FieldConfig& field);

SpinorWeights jl_spinor(const LandauIndex& idx, const FieldConfig& field);

enum class LadderKind { lowering, raising, forbidden };

// Explicit-form matrix element <bra|A(t)|ket> (lowering, ket one level up) or
// <bra|A^dagger(t)|ket> (raising, ket one level down), split into the parts
// carried by the positive (first) and negative (second) branch of the upper
// state. A forbidden pair is reported as such rather than as a numerical zero.
struct LadderElement {
    LadderKind kind = LadderKind::forbidden;
    std::complex<double> first{};
    std::complex<double> second{};

    bool allowed() const noexcept { return kind != LadderKind::forbidden; }
    std::complex<double> value() const noexcept { return first + second; }
};

LadderElement ladder_matrix_element(double t, const LandauIndex& bra, const LandauIndex& ket,
                                    const FieldConfig& field);

// Same element from the Heisenberg picture: the t = 0 element obtained by
// applying the ladder operator to the spinor components, times the phase
// exp(i (eps E - eps' E') t).
LadderElement ladder_heisenberg_element(double t, const LandauIndex& bra, const LandauIndex& ket,
                                        const FieldConfig& field);

}  // namespace zitter
