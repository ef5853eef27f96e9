#include "zitter/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "zitter/errors.hpp"
#include "zitter/parallel.hpp"
#include "zitter/special.hpp"

namespace zitter {

namespace {

using cplx = std::complex<double>;
using namespace std::complex_literals;

constexpr int probe_levels = 400;
constexpr double negligible_tail = 1e-14;
constexpr int kz_panel_order = 64;
constexpr double kz_phase_per_panel = 32.0;
constexpr std::size_t audit_stride = 16;

void check_truncation(int truncation) {
    if (truncation < 0) throw ConfigError("oracle truncation must be non-negative");
    if (truncation > psi_capacity)
        throw CapacityError("oracle truncation " + std::to_string(truncation) +
                            " exceeds level capacity");
}

// a V for a = lowering x I_4: row (sigma, m) takes sqrt(m+1) row (sigma, m+1).
Eigen::MatrixXd apply_lowering(const Eigen::MatrixXd& v, int truncation) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v.rows(), v.cols());
    for (int m = 0; m < truncation; ++m)
        for (int s = 0; s < 4; ++s)
            out.row(DenseHamiltonian::index(s, m)) =
                std::sqrt(m + 1.0) * v.row(DenseHamiltonian::index(s, m + 1));
    return out;
}

// alpha_x V: sigma_x on the off-diagonal spinor blocks.
Eigen::MatrixXd apply_alpha_x(const Eigen::MatrixXd& v, int truncation) {
    Eigen::MatrixXd out(v.rows(), v.cols());
    constexpr int partner[4] = {3, 2, 1, 0};
    for (int m = 0; m <= truncation; ++m)
        for (int s = 0; s < 4; ++s)
            out.row(DenseHamiltonian::index(s, m)) = v.row(DenseHamiltonian::index(partner[s], m));
    return out;
}

// S V where alpha_y = i S with S real antisymmetric.
Eigen::MatrixXd apply_alpha_y_real(const Eigen::MatrixXd& v, int truncation) {
    Eigen::MatrixXd out(v.rows(), v.cols());
    constexpr int partner[4] = {3, 2, 1, 0};
    constexpr double sign[4] = {-1.0, 1.0, -1.0, 1.0};
    for (int m = 0; m <= truncation; ++m)
        for (int s = 0; s < 4; ++s)
            out.row(DenseHamiltonian::index(s, m)) =
                sign[s] * v.row(DenseHamiltonian::index(partner[s], m));
    return out;
}

Eigen::VectorXd place_spinor(const SpinorWeights& w, int truncation) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4 * (truncation + 1));
    const auto levels = w.levels();
    for (int s = 0; s < 4; ++s) {
        if (levels[s] < 0) continue;
        if (levels[s] > truncation) throw ConfigError("spinor level above the dense truncation");
        v(DenseHamiltonian::index(s, levels[s])) = w.components[std::size_t(s)];
    }
    return v;
}

// Level-space density of the packet: sum over k_x nodes of F F^T, stored
// as a low-rank factor R with G = R R^T.
struct LevelDensity {
    Eigen::MatrixXd factor;
    int truncation = 0;
    double leakage = 0.0;
    double trace_error = 0.0;
    double guiding_centre = 0.0;
};

Eigen::MatrixXd sampled_amplitudes(const GaussianPacket& packet, const FieldConfig& field,
                                   const QuadratureRule& rule, int levels) {
    const auto count = rule.size();
    Eigen::MatrixXd F(levels + 1, Eigen::Index(count));
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        std::vector<double> column(std::size_t(levels) + 1);
        for (std::size_t j = begin; j < end; ++j) {
            landau_amplitudes(packet, field, rule.nodes[j], column);
            const double w = std::sqrt(rule.weights[j]);
            for (int n = 0; n <= levels; ++n) F(n, Eigen::Index(j)) = w * column[std::size_t(n)];
        }
    });
    return F;
}

LevelDensity level_density(const GaussianPacket& packet, const FieldConfig& field,
                           const OracleOptions& options) {
    const double L = field.magnetic_length();
    // sum_n F_n(k)^2 = (d_x / sqrt pi) exp(-d_x^2 (k - k0x)^2), so the level
    // populations add up to one and 1 - sum bounds the unsampled tail
    const double half = 7.0 / packet.d_x;
    const auto rule = clenshaw_curtis(packet.k0x - half, packet.k0x + half, options.kx_panels);
    int probe = options.truncation > 0 ? std::min(psi_capacity, options.truncation + 1) : 64;
    Eigen::MatrixXd F = sampled_amplitudes(packet, field, rule, probe);
    while (options.truncation <= 0 && probe < probe_levels &&
           1.0 - F.squaredNorm() > negligible_tail) {
        probe = std::min(2 * probe, probe_levels);
        F = sampled_amplitudes(packet, field, rule, probe);
    }
    const Eigen::VectorXd mass = F.rowwise().squaredNorm();
    double total = 0.0, centre = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const double m = F.col(Eigen::Index(j)).squaredNorm();
        total += m;
        centre += rule.nodes[j] * L * L * m;
    }
    LevelDensity out;
    out.trace_error = std::abs(total - 1.0);
    out.guiding_centre = centre;

    std::vector<double> tail(std::size_t(probe) + 2, 0.0);
    tail[std::size_t(probe) + 1] = std::max(0.0, 1.0 - total);
    for (int n = probe; n >= 0; --n) tail[std::size_t(n)] = tail[std::size_t(n) + 1] + mass(n);
    int N = options.truncation;
    if (N <= 0) {
        int cut = probe;
        for (int n = 0; n <= probe; ++n)
            if (tail[std::size_t(n) + 1] <= negligible_tail) {
                cut = n;
                break;
            }
        N = std::min(cut + options.guard, psi_capacity);
    }
    check_truncation(N);
    const int edge = std::max(0, N - options.guard);
    out.truncation = N;
    out.leakage = tail[std::size_t(std::min(edge + 1, probe + 1))];
    if (out.leakage > options.leakage_tolerance)
        throw ToleranceError("oracle truncation N = " + std::to_string(N) +
                                 " leaves population " + std::to_string(out.leakage) +
                                 " within the guard band; spectral contamination",
                             out.leakage);

    const int levels = std::min(N, probe) + 1;
    Eigen::MatrixXd G = F.topRows(levels) * F.topRows(levels).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G);
    const auto& lambda = solver.eigenvalues();
    const double cutoff = 1e-18 * std::max(lambda.maxCoeff(), 1e-300);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = lambda.size() - 1; i >= 0; --i)
        if (lambda(i) > cutoff) keep.push_back(i);
    out.factor = Eigen::MatrixXd::Zero(N + 1, Eigen::Index(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        out.factor.col(Eigen::Index(c)).head(levels) =
            solver.eigenvectors().col(keep[c]) * std::sqrt(lambda(keep[c]));
    return out;
}

struct Channels {
    std::vector<double> y, x, vx, vy;
    double y0 = 0.0;
    double norm_drift = 0.0, energy_drift = 0.0, leakage = 0.0;

    void resize(std::size_t n) {
        y.assign(n, 0.0);
        x.assign(n, 0.0);
        vx.assign(n, 0.0);
        vy.assign(n, 0.0);
    }
};

struct PairEntry {
    int i, j;
    cplx y, x, vx, vy;  // rho_ij O_ji
};

Channels evolve_node(const LevelDensity& density, const GaussianPacket& packet,
                     const FieldConfig& field, double k_z, std::span<const double> times,
                     int guard, bool audit) {
    const int N = density.truncation;
    const auto H = DenseHamiltonian::build(N, field, k_z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.matrix);
    const Eigen::VectorXd& E = solver.eigenvalues();
    const Eigen::MatrixXd& V = solver.eigenvectors();
    const Eigen::Index d = H.dimension();

    // initial states a (x) R_j in the dense basis, B = V^T C
    const Eigen::MatrixXd& R = density.factor;
    Eigen::MatrixXd V1(N + 1, d), V2(N + 1, d);
    for (int m = 0; m <= N; ++m) {
        V1.row(m) = V.row(DenseHamiltonian::index(0, m));
        V2.row(m) = V.row(DenseHamiltonian::index(1, m));
    }
    const Eigen::MatrixXcd B = packet.a1 * (V1.transpose() * R).cast<cplx>() +
                               packet.a2 * (V2.transpose() * R).cast<cplx>();

    // only populated eigenstates enter rho_ij = B_i . conj(B_j)
    std::vector<Eigen::Index> live;
    for (Eigen::Index i = 0; i < d; ++i)
        if (B.row(i).squaredNorm() > 1e-28) live.push_back(i);
    const auto p = Eigen::Index(live.size());
    Eigen::MatrixXd Vp(d, p);
    Eigen::MatrixXcd Bp(p, B.cols());
    Eigen::VectorXd Ep(p);
    for (Eigen::Index c = 0; c < p; ++c) {
        Vp.col(c) = V.col(live[std::size_t(c)]);
        Bp.row(c) = B.row(live[std::size_t(c)]);
        Ep(c) = E(live[std::size_t(c)]);
    }
    const Eigen::MatrixXcd rho = Bp * Bp.adjoint();
    const Eigen::MatrixXd A = Vp.transpose() * apply_lowering(Vp, N);
    const Eigen::MatrixXd Ax = Vp.transpose() * apply_alpha_x(Vp, N);
    const Eigen::MatrixXd Sy = Vp.transpose() * apply_alpha_y_real(Vp, N);
    const double L = field.magnetic_length();
    const double s = L / std::sqrt(2.0);

    // O_ji for the four channels
    auto y_el = [&](Eigen::Index i, Eigen::Index j) { return cplx(s * (A(j, i) + A(i, j))); };
    auto x_el = [&](Eigen::Index i, Eigen::Index j) { return -1i * s * (A(j, i) - A(i, j)); };
    auto vx_el = [&](Eigen::Index i, Eigen::Index j) { return cplx(Ax(j, i)); };
    auto vy_el = [&](Eigen::Index i, Eigen::Index j) { return 1i * Sy(j, i); };

    Channels out;
    out.resize(times.size());
    double diag_y = 0.0, diag_x = 0.0, diag_vx = 0.0, diag_vy = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        const double w = rho(i, i).real();
        diag_y += w * y_el(i, i).real();
        diag_x += w * x_el(i, i).real();
        diag_vx += w * vx_el(i, i).real();
        diag_vy += w * vy_el(i, i).real();
    }
    double scale = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            scale = std::max(scale, std::abs(rho(i, j)) * (std::abs(A(i, j)) * L + 1.0));
    std::vector<PairEntry> entries;
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < j; ++i) {
            const double magnitude =
                std::abs(rho(i, j)) *
                (L * (std::abs(A(i, j)) + std::abs(A(j, i))) + std::abs(Ax(j, i)) + std::abs(Sy(j, i)));
            if (magnitude <= 1e-16 * scale) continue;
            const cplx r = rho(i, j);
            entries.push_back({int(i), int(j), r * y_el(i, j), r * x_el(i, j), r * vx_el(i, j),
                               r * vy_el(i, j)});
        }

    std::vector<cplx> phase(static_cast<std::size_t>(p));
    auto evaluate = [&](double t, double& y, double& x, double& vx, double& vy) {
        for (Eigen::Index i = 0; i < p; ++i) phase[std::size_t(i)] = std::polar(1.0, -Ep(i) * t);
        double sy = 0.0, sx = 0.0, svx = 0.0, svy = 0.0;
        for (const auto& e : entries) {
            const cplx ph = phase[std::size_t(e.i)] * std::conj(phase[std::size_t(e.j)]);
            sy += (e.y * ph).real();
            sx += (e.x * ph).real();
            svx += (e.vx * ph).real();
            svy += (e.vy * ph).real();
        }
        y = diag_y + 2.0 * sy;
        x = diag_x + 2.0 * sx;
        vx = diag_vx + 2.0 * svx;
        vy = diag_vy + 2.0 * svy;
    };
    double unused;
    evaluate(0.0, out.y0, unused, unused, unused);
    for (std::size_t k = 0; k < times.size(); ++k)
        evaluate(times[k], out.y[k], out.x[k], out.vx[k], out.vy[k]);

    if (!audit) return out;
    // norm, energy and guard-band population of psi(t) rebuilt in the level
    // basis at the latest time, from the full eigenbasis
    double t_check = 0.0;
    for (double t : times) t_check = std::max(t_check, std::abs(t));
    const Eigen::VectorXcd u = (-1i * E.cast<cplx>() * t_check).array().exp().matrix();
    const Eigen::MatrixXcd psi0 = V.cast<cplx>() * B;
    const Eigen::MatrixXcd psi_t = V.cast<cplx>() * (u.asDiagonal() * B);
    const Eigen::MatrixXcd Hc = H.matrix.cast<cplx>();
    const Eigen::MatrixXcd h0 = Hc * psi0, ht = Hc * psi_t;
    out.norm_drift = std::abs(psi_t.squaredNorm() - psi0.squaredNorm());
    out.energy_drift =
        std::abs((psi_t.adjoint() * ht).trace().real() - (psi0.adjoint() * h0).trace().real());
    const int edge = std::max(0, N - guard + 1);
    out.leakage = psi_t.bottomRows(d - 4 * edge).squaredNorm();
    return out;
}

struct KzNode {
    double k_z;
    double weight;
};

std::vector<KzNode> kz_nodes(const GaussianPacket& packet, std::span<const double> times,
                             const OracleOptions& options) {
    if (packet.model == Model::planar) return {{0.0, 1.0}};
    const double lo_u = -options.kz_extent, hi_u = options.kz_extent;
    int panels = options.kz_panels;
    if (panels <= 0) {
        double t_max = 0.0;
        for (double t : times) t_max = std::max(t_max, std::abs(t));
        // |d(E_n + E_m)/dk_z| <= 2 |k_z| / sqrt(1 + k_z^2)
        const double k_lo = packet.k0z + lo_u / packet.d_z, k_hi = packet.k0z + hi_u / packet.d_z;
        auto rest = [](double k) { return std::sqrt(1.0 + k * k); };
        const double variation =
            (k_lo < 0.0 && k_hi > 0.0) ? (rest(k_lo) - 1.0) + (rest(k_hi) - 1.0)
                                       : std::abs(rest(k_hi) - rest(k_lo));
        panels = std::max(2, int(std::ceil(2.0 * t_max * variation / kz_phase_per_panel)));
    }
    const auto rule = clenshaw_curtis(lo_u, hi_u, panels, kz_panel_order);
    std::vector<KzNode> nodes;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double u = rule.nodes[i];
        nodes.push_back({packet.k0z + u / packet.d_z,
                         rule.weights[i] * std::exp(-u * u) / std::sqrt(std::numbers::pi)});
    }
    return nodes;
}

}  // namespace

DenseHamiltonian DenseHamiltonian::build(int truncation, const FieldConfig& field, double k_z) {
    check_truncation(truncation);
    DenseHamiltonian h;
    h.truncation = truncation;
    h.k_z = k_z;
    const int d = h.dimension();
    h.matrix = Eigen::MatrixXd::Zero(d, d);
    const double w = field.omega();
    for (int m = 0; m <= truncation; ++m) {
        h.matrix(index(0, m), index(0, m)) = 1.0;
        h.matrix(index(1, m), index(1, m)) = 1.0;
        h.matrix(index(2, m), index(2, m)) = -1.0;
        h.matrix(index(3, m), index(3, m)) = -1.0;
        h.matrix(index(0, m), index(2, m)) = h.matrix(index(2, m), index(0, m)) = k_z;
        h.matrix(index(1, m), index(3, m)) = h.matrix(index(3, m), index(1, m)) = -k_z;
        if (m < truncation) {
            const double ladder = -w * std::sqrt(m + 1.0);
            h.matrix(index(0, m), index(3, m + 1)) = h.matrix(index(3, m + 1), index(0, m)) = ladder;
            h.matrix(index(1, m + 1), index(2, m)) = h.matrix(index(2, m), index(1, m + 1)) = ladder;
        }
    }
    return h;
}

Eigen::VectorXd dense_spectrum(const DenseHamiltonian& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.matrix,
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

Eigen::MatrixXd lowering_operator(int truncation) {
    check_truncation(truncation);
    const int d = 4 * (truncation + 1);
    return apply_lowering(Eigen::MatrixXd::Identity(d, d), truncation);
}

PositionOperators PositionOperators::build(int truncation, const FieldConfig& field) {
    const Eigen::MatrixXcd a = lowering_operator(truncation).cast<cplx>();
    const double s = field.magnetic_length() / std::sqrt(2.0);
    return {s * (a + a.adjoint()), -1i * s * (a - a.adjoint())};
}

Eigen::MatrixXcd alpha_x(int truncation) {
    check_truncation(truncation);
    const int d = 4 * (truncation + 1);
    return apply_alpha_x(Eigen::MatrixXd::Identity(d, d), truncation).cast<cplx>();
}

Eigen::MatrixXcd alpha_y(int truncation) {
    check_truncation(truncation);
    const int d = 4 * (truncation + 1);
    return 1i * apply_alpha_y_real(Eigen::MatrixXd::Identity(d, d), truncation).cast<cplx>();
}

double spinor_check(const LandauIndex& idx, const DenseHamiltonian& hamiltonian,
                    const FieldConfig& field) {
    LandauIndex local = idx;
    local.k_z = hamiltonian.k_z;
    const auto w = jl_spinor(local, field);
    const Eigen::VectorXd v = place_spinor(w, hamiltonian.truncation);
    const double e = idx.epsilon * landau_energy(idx.n, hamiltonian.k_z, field);
    return (hamiltonian.matrix * v - e * v).norm();
}

double eigenspace_check(int n, int epsilon, const DenseHamiltonian& hamiltonian,
                        const FieldConfig& field) {
    const int N = hamiltonian.truncation;
    const int d = hamiltonian.dimension();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(d, d);
    for (int s : {-1, 1}) {
        if (s == 1 && n == 0) continue;
        const Eigen::VectorXd v =
            place_spinor(jl_spinor({n, 0.0, hamiltonian.k_z, epsilon, s}, field), N);
        expected += v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.matrix);
    const double target = epsilon * landau_energy(n, hamiltonian.k_z, field);
    Eigen::MatrixXd found = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (std::abs(solver.eigenvalues()(i) - target) > 1e-8) continue;
        const Eigen::VectorXd v = solver.eigenvectors().col(i);
        found += v * v.transpose();
    }
    // the truncated top block repeats +/- E_0 on level N alone and may mix
    // with n = 0 inside the degenerate eigenspace
    if (n < N) {
        Eigen::VectorXd keep = Eigen::VectorXd::Ones(d);
        for (int s = 0; s < 4; ++s) keep(DenseHamiltonian::index(s, N)) = 0.0;
        found = keep.asDiagonal() * found * keep.asDiagonal();
    }
    return (found - expected).cwiseAbs().maxCoeff();
}

OracleTrajectory evolve_expectations(const GaussianPacket& packet, const FieldConfig& field,
                                     std::span<const double> times, const OracleOptions& options) {
    packet.validate();
    if (options.guard < 0) throw ConfigError("oracle guard band must be non-negative");
    const auto density = level_density(packet, field, options);
    const auto nodes = kz_nodes(packet, times, options);

    OracleTrajectory out;
    out.model = packet.model;
    out.times.assign(times.begin(), times.end());
    out.truncation = density.truncation;
    out.guiding_centre = density.guiding_centre;
    out.density_trace_error = density.trace_error;
    out.leakage = density.leakage;
    out.kz_nodes = nodes.size();
    const std::size_t n = times.size();
    std::vector<double> y(n, 0.0), x(n, 0.0), vx(n, 0.0), vy(n, 0.0);
    double y0 = 0.0;

    // fixed-size batches keep the reduction order independent of threads
    constexpr std::size_t batch = 32;
    for (std::size_t first = 0; first < nodes.size(); first += batch) {
        const std::size_t count = std::min(batch, nodes.size() - first);
        std::vector<Channels> results(count);
        parallel_for(count, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                results[i] = evolve_node(density, packet, field, nodes[first + i].k_z, times,
                                         options.guard, (first + i) % audit_stride == 0 ||
                                                            first + i + 1 == nodes.size());
        });
        for (std::size_t i = 0; i < count; ++i) {
            const double w = nodes[first + i].weight;
            const auto& r = results[i];
            for (std::size_t k = 0; k < n; ++k) {
                y[k] += w * r.y[k];
                x[k] += w * r.x[k];
                vx[k] += w * r.vx[k];
                vy[k] += w * r.vy[k];
            }
            y0 += w * r.y0;
            out.norm_drift = std::max(out.norm_drift, r.norm_drift);
            out.energy_drift = std::max(out.energy_drift, r.energy_drift);
            out.leakage = std::max(out.leakage, r.leakage);
        }
    }
    if (out.leakage > options.leakage_tolerance)
        throw ToleranceError("oracle evolution leaked population " + std::to_string(out.leakage) +
                                 " into the guard band",
                             out.leakage);
    out.y_initial = y0;
    for (auto& v : y) v -= y0;
    out.y = std::move(y);
    out.x = std::move(x);
    out.vx = std::move(vx);
    out.vy = std::move(vy);
    return out;
}

}  // namespace zitter
