#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "zitter/landau.hpp"
#include "zitter/packet.hpp"
#include "zitter/units.hpp"

// Brute-force reference: the Dirac Hamiltonian in the truncated basis
// spinor component x oscillator level, diagonalized densely. Uses only the
// packet's F_n(k_x) and raw matrices; none of the analytic series.

namespace zitter {

// Basis index 4 m + sigma, sigma = 0..3, m = 0..N. The matrix is real
// symmetric in this gauge.
struct DenseHamiltonian {
    int truncation = 0;  // N
    double k_z = 0.0;
    Eigen::MatrixXd matrix;

    static DenseHamiltonian build(int truncation, const FieldConfig& field, double k_z = 0.0);

    int dimension() const noexcept { return 4 * (truncation + 1); }
    static int index(int component, int level) noexcept { return 4 * level + component; }
};

// Ascending eigenvalues.
Eigen::VectorXd dense_spectrum(const DenseHamiltonian& hamiltonian);

struct PositionOperators {
    Eigen::MatrixXcd y;  // (L / sqrt 2)(a + a^dagger) x I_4
    Eigen::MatrixXcd x;  // (L / i sqrt 2)(a - a^dagger) x I_4

    static PositionOperators build(int truncation, const FieldConfig& field);
};

Eigen::MatrixXd lowering_operator(int truncation);  // a x I_4
Eigen::MatrixXcd alpha_x(int truncation);
Eigen::MatrixXcd alpha_y(int truncation);

// ||(H - eps E) psi|| for the Johnson-Lippman spinor placed in the dense
// basis.
double spinor_check(const LandauIndex& idx, const DenseHamiltonian& hamiltonian,
                    const FieldConfig& field);

// Max-norm distance between the projector onto span{s = +1, s = -1}
// spinors of (n, eps) and the dense eigenspace of eps E_n.
double eigenspace_check(int n, int epsilon, const DenseHamiltonian& hamiltonian,
                        const FieldConfig& field);

struct OracleOptions {
    int truncation = 0;  // 0: smallest N whose tail mass is negligible, plus guard
    int guard = 20;
    double leakage_tolerance = 1e-10;
    int kx_panels = 48;   // order-16 Clenshaw-Curtis panels over k_x
    int kz_panels = 0;    // order-64 panels over k_z; 0 picks from the phase span
    double kz_extent = 6.0;  // k_z range k0z +/- kz_extent / d_z
};

struct OracleTrajectory {
    Model model = Model::planar;
    std::vector<double> times;
    std::vector<double> x, y;    // y relative to <Y>(0); x as computed
    std::vector<double> vx, vy;  // <alpha_x>, <alpha_y>
    double y_initial = 0.0;       // <Y>(0)
    double guiding_centre = 0.0;  // integral of k_x L^2 over the packet
    int truncation = 0;
    double leakage = 0.0;         // population within the guard band
    double norm_drift = 0.0;      // max |<psi(t)|psi(t)> - <psi(0)|psi(0)>|
    double energy_drift = 0.0;    // max |<H>(t) - <H>(0)|
    double density_trace_error = 0.0;  // |Tr rho - 1| of the k_x quadrature
    std::size_t kz_nodes = 1;
};

OracleTrajectory evolve_expectations(const GaussianPacket& packet, const FieldConfig& field,
                                     std::span<const double> times,
                                     const OracleOptions& options = {});

}  // namespace zitter
