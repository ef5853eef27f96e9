#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zitter/units.hpp"

namespace zitter {

enum class Model { planar, spatial };  // 2+1 and 3+1 Dirac equation

std::string_view to_string(Model model) noexcept;
Model model_from_string(std::string_view text);

// Gaussian packet times the spinor (a1, a2, 0, 0). Lengths in Compton
// wavelengths, wavenumbers in inverse Compton wavelengths.
struct GaussianPacket {
    double d_x = 1.0;
    double d_y = 1.0;
    double d_z = 1.0;
    double k0x = 0.0;
    double k0z = 0.0;
    std::complex<double> a1{0.0, 0.0};
    std::complex<double> a2{1.0, 0.0};
    Model model = Model::planar;
    // |k0| < 1/lambda_c. Trap runs with k0x = 1/Delta exceed it once kappa > 1/4.
    bool bounded_momentum = true;

    void validate() const;
};

// Partial Fourier transform of the transverse profile.
double g_xy(const GaussianPacket& packet, double k_x, double y);

// Longitudinal momentum amplitude; throws for a 2+1 packet, where the k_z
// distribution is a delta function.
double g_z(const GaussianPacket& packet, double k_z);

// F_n(k_x), the overlap of the packet with the Landau state |n, k_x>, by a
// three-term recurrence in n. Small values keep their relative accuracy.
double landau_amplitude(const GaussianPacket& packet, const FieldConfig& field, int n, double k_x);

// F_0 .. F_{out.size()-1} at one k_x.
void landau_amplitudes(const GaussianPacket& packet, const FieldConfig& field, double k_x,
                       std::span<double> out);

// F_n by Gauss-Hermite quadrature over y. Absolute accuracy only: values far
// below max |F| lose digits to cancellation.
double landau_amplitude_quadrature(const GaussianPacket& packet, const FieldConfig& field, int n,
                                   double k_x);

// Closed form of F_n; undefined for d_y = L.
double landau_amplitude_closed(const GaussianPacket& packet, const FieldConfig& field, int n,
                               double k_x);

inline constexpr int default_level_cap = 400;

struct CoefficientOptions {
    int n_max = default_level_cap;
    // largest acceptable missing probability 1 - sum U_nn
    double tail_tolerance = 1e-10;
    // levels above the point where the running tail drops below this are
    // discarded
    double truncation_tail = 1e-12;
    bool auto_truncate = true;
    int kx_order = 0;  // 0 selects max(256, n_max + 16), capped at 512
};

struct CoefficientSet {
    int n_max = 0;        // retained truncation level
    int n_requested = 0;  // level up to which F_n was evaluated
    Eigen::MatrixXcd U;
    std::vector<double> k_nodes;
    std::vector<double> k_weights;  // plain weights for dk_x
    Eigen::MatrixXd F_nodes;        // F_n(k_j), rows j, columns n
    double tail_mass = 0.0;
    // max relative deviation from the d_y = L closed form, when it applies
    std::optional<double> closed_form_deviation;

    std::complex<double> u(int m, int n) const { return U(m, n); }
};

CoefficientSet coefficient_matrix(const GaussianPacket& packet, const FieldConfig& field,
                                  const CoefficientOptions& options = {});

// U_{m,n} for d_y = L from the Hermite closed form, evaluated in log space.
Eigen::MatrixXd coefficient_matrix_equal_widths(const GaussianPacket& packet,
                                                const FieldConfig& field, int n_max);

// General closed form as a finite alternating sum; only reliable for small
// m + n.
std::complex<double> coefficient_closed(const GaussianPacket& packet, const FieldConfig& field,
                                        int m, int n);

struct SumRuleReport {
    double normalization = 0.0;           // sum U_nn
    double momentum = 0.0;                // sum sqrt(n+1) U_{n+1,n}
    double momentum_expected = 0.0;       // -k0x L / sqrt 2
    double normalization_residual = 0.0;  // |sum U_nn - 1|
    double momentum_residual = 0.0;
    double tail_mass = 0.0;
};

SumRuleReport sum_rules(const CoefficientSet& coeffs, const GaussianPacket& packet,
                        const FieldConfig& field);

}  // namespace zitter
