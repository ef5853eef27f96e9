#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zitter/packet.hpp"
#include "zitter/units.hpp"

// Analytic evolution of <x>, <y> for a packet (a1, a2, 0, 0) f(r). All
// series are sums of lines P cos(w t) + R sin(w t) acting on the complex
// position z = y + i x relative to the guiding centre; the 3+1 model folds
// the k_z quadrature into the line set.

namespace zitter {

enum class LineKind { cyclotron, zitter };

struct SpectralLine {
    int n = 0;
    LineKind kind = LineKind::cyclotron;
    double frequency = 0.0;
    double amplitude_x = 0.0;
    double amplitude_y = 0.0;
    std::complex<double> cos_part{};  // contribution to y + i x
    std::complex<double> sin_part{};
};

struct DynamicsOptions {
    double kz_tolerance = 1e-9;  // relative, per channel
    int kz_order = 64;           // starting Gauss-Hermite order
    double tail_tolerance = 1e-10;
};

struct Trajectory {
    Model model = Model::planar;
    std::vector<double> times;
    std::vector<double> x, y;    // Compton wavelengths, guiding-centre relative
    std::vector<double> vx, vy;  // units of c
    // oscillatory parts of y + i x, without the offset
    std::vector<std::complex<double>> cyclotron, zitter;
    double y_offset = 0.0;         // constant added so that y(0) = 0
    double appendix_offset = 0.0;  // <Y(0)> = -k0x L^2
    double offset_residual = 0.0;  // y_offset - k0x L^2
    double kz_error = 0.0;         // achieved k_z quadrature estimate, relative
};

Trajectory trajectory_2p1(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options = {});

Trajectory trajectory_3p1(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options = {});

// Dispatches on packet.model.
Trajectory trajectory(const GaussianPacket& packet, const CoefficientSet& coeffs,
                      const FieldConfig& field, std::span<const double> times,
                      const DynamicsOptions& options = {});

struct MixingSeries {
    std::vector<double> times;
    // (1/2) a2^* a1 sum_n U_nn J_c^{+/-}(t); their sum is <A(t)>^{2,1}
    std::vector<std::complex<double>> plus, minus;
};

MixingSeries mixing_terms(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options = {});

struct VelocitySeries {
    std::vector<double> vx, vy;
};

VelocitySeries velocities(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options = {});

// T^{s1 s2}_{s3 s4} = s1 + s2 / E_n + s3 / E_{n+1} + s4 E_n / E_{n+1}
double t_factor(int s1, int s2, int s3, int s4, double e_lower, double e_upper);

struct SubPacketSeries {
    std::vector<double> times;
    std::vector<std::complex<double>> lower_positive;   // <A_1>
    std::vector<std::complex<double>> lower_negative;   // <A_2>
    std::vector<std::complex<double>> raise_positive;   // <A_1^dagger>
    std::vector<std::complex<double>> raise_negative;   // <A_2^dagger>
};

SubPacketSeries subpackets(const GaussianPacket& packet, const CoefficientSet& coeffs,
                           const FieldConfig& field, std::span<const double> times);

std::vector<SpectralLine> spectral_decomposition(const GaussianPacket& packet,
                                                 const CoefficientSet& coeffs,
                                                 const FieldConfig& field);

struct LowFieldSummary {
    double cyclotron_radius = 0.0;  // k0x L^2
    double omega_cyclotron = 0.0;
    double zitter_amplitude = 0.0;  // k0x / 2 in Compton units
    double zitter_frequency = 2.0;
    double d_z = 0.0;               // envelope width parameter, 0 for 2+1
    double kappa = 0.0;
    std::optional<std::string> warning;

    // envelope model [d_z^4 + t^2]^{-1/4} normalized to 1 at t = 0
    double envelope(double t) const;
};

LowFieldSummary lowfield_summary(const GaussianPacket& packet, const FieldConfig& field);

}  // namespace zitter
