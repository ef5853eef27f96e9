#include "zitter/packet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zitter/errors.hpp"
#include "zitter/parallel.hpp"
#include "zitter/special.hpp"

namespace zitter {

namespace {

using cplx = std::complex<double>;

int y_rule_order(int n_max) { return std::clamp(n_max / 2 + 32, 64, gauss_hermite_max_order); }

// D = L^2 / sqrt(L^2 + d_y^2)
double reduced_width(const GaussianPacket& p, double L) { return L * L / std::hypot(L, p.d_y); }

void amplitudes_with_rule(const GaussianPacket& packet, const FieldConfig& field, double k_x,
                          const QuadratureRule& rule, std::span<double> out,
                          std::vector<double>& scratch) {
    const double L = field.magnetic_length();
    const double beta = L * L / (2.0 * packet.d_y * packet.d_y);
    const double a = 0.5 + beta;
    const double centre = -beta * k_x * L / a;
    const double scale = 1.0 / std::sqrt(a);
    const double dk = k_x - packet.k0x;
    const double prefactor = std::sqrt(L) * std::sqrt(packet.d_x / (std::numbers::pi * packet.d_y)) *
                             std::exp(-0.5 * packet.d_x * packet.d_x * dk * dk) * scale;
    std::fill(out.begin(), out.end(), 0.0);
    scratch.resize(out.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double xi = centre + scale * rule.nodes[i];
        const double shifted = xi + k_x * L;
        const double weight = prefactor * rule.plain_weights[i] * std::exp(-beta * shifted * shifted);
        if (weight == 0.0) continue;
        psi_levels(xi, scratch);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += weight * scratch[n];
    }
}

// Three-term recurrence for the overlaps c_n of exp(-beta (xi + a)^2) with
// psi_n(xi), from a-dagger acting on psi_n; no cancellation for small c_n.
void amplitudes_by_recurrence(const GaussianPacket& packet, const FieldConfig& field, double k_x,
                              std::span<double> out) {
    const double L = field.magnetic_length();
    const double beta = L * L / (2.0 * packet.d_y * packet.d_y);
    const double A = 0.5 + beta;
    const double a = k_x * L;
    const double dk = k_x - packet.k0x;
    double log_scale = 0.5 * std::log(packet.d_x * L / (std::numbers::pi * packet.d_y)) -
                       0.5 * packet.d_x * packet.d_x * dk * dk + 0.5 * std::log(1.0 / A) +
                       0.25 * std::log(std::numbers::pi) - beta * a * a / (2.0 * A);
    const double p = (1.0 - 2.0 * beta) / (1.0 + 2.0 * beta);
    const double q = -2.0 * std::numbers::sqrt2 * beta * a / (1.0 + 2.0 * beta);
    double prev = 0.0, cur = 1.0;
    constexpr double big = 1e150;
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = cur * std::exp(log_scale);
        const double next = (p * std::sqrt(double(n)) * prev + q * cur) / std::sqrt(double(n + 1));
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
            prev /= big;
            cur /= big;
            log_scale += std::log(big);
        }
    }
}

}  // namespace

std::string_view to_string(Model model) noexcept {
    return model == Model::planar ? "2+1" : "3+1";
}

Model model_from_string(std::string_view text) {
    if (text == "2+1") return Model::planar;
    if (text == "3+1") return Model::spatial;
    throw ConfigError("model must be \"2+1\" or \"3+1\", got \"" + std::string(text) + "\"");
}

void GaussianPacket::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(d_x) || !positive(d_y)) throw ConfigError("packet widths d_x, d_y must be positive");
    if (model == Model::spatial && !positive(d_z))
        throw ConfigError("packet width d_z must be positive for a 3+1 packet");
    if (model == Model::planar && k0z != 0.0)
        throw ConfigError("k0z must be zero for a 2+1 packet");
    const double norm = std::norm(a1) + std::norm(a2);
    if (std::abs(norm - 1.0) > 1e-12)
        throw ConfigError("spinor amplitudes must satisfy |a1|^2 + |a2|^2 = 1 (got " +
                          std::to_string(norm) + ")");
    const double k0 = std::hypot(k0x, k0z);
    if (!std::isfinite(k0)) throw ConfigError("packet momentum must be finite");
    if (bounded_momentum && !(k0 < 1.0))
        throw ConfigError("packet momentum |k0| must be below 1/lambda_c");
}

double g_xy(const GaussianPacket& packet, double k_x, double y) {
    const double dk = k_x - packet.k0x;
    return std::sqrt(packet.d_x / (std::numbers::pi * packet.d_y)) *
           std::exp(-0.5 * packet.d_x * packet.d_x * dk * dk) *
           std::exp(-0.5 * y * y / (packet.d_y * packet.d_y));
}

double g_z(const GaussianPacket& packet, double k_z) {
    if (packet.model != Model::spatial)
        throw ConfigError("g_z is undefined for a 2+1 packet: its k_z distribution is delta(k_z)");
    const double dk = k_z - packet.k0z;
    return std::pow(packet.d_z * packet.d_z / std::numbers::pi, 0.25) *
           std::exp(-0.5 * packet.d_z * packet.d_z * dk * dk);
}

void landau_amplitudes(const GaussianPacket& packet, const FieldConfig& field, double k_x,
                       std::span<double> out) {
    if (out.empty()) return;
    const int n_max = int(out.size()) - 1;
    if (n_max > psi_capacity)
        throw CapacityError("level " + std::to_string(n_max) + " exceeds capacity");
    amplitudes_by_recurrence(packet, field, k_x, out);
}

double landau_amplitude_quadrature(const GaussianPacket& packet, const FieldConfig& field, int n,
                                   double k_x) {
    if (n < 0) throw ConfigError("level must be non-negative");
    if (n > psi_capacity) throw CapacityError("level " + std::to_string(n) + " exceeds capacity");
    std::vector<double> out(std::size_t(n) + 1);
    const auto rule = gauss_hermite(y_rule_order(n));
    std::vector<double> scratch;
    amplitudes_with_rule(packet, field, k_x, rule, out, scratch);
    return out.back();
}

double landau_amplitude(const GaussianPacket& packet, const FieldConfig& field, int n, double k_x) {
    if (n < 0) throw ConfigError("level must be non-negative");
    std::vector<double> values(std::size_t(n) + 1);
    landau_amplitudes(packet, field, k_x, values);
    return values[std::size_t(n)];
}

double landau_amplitude_closed(const GaussianPacket& packet, const FieldConfig& field, int n,
                               double k_x) {
    const double L = field.magnetic_length();
    if (std::abs(packet.d_y - L) / L < 1e-6)
        throw DomainError("closed-form F_n is singular for d_y = L; use the quadrature path");
    const double L2 = L * L, dy2 = packet.d_y * packet.d_y;
    const cplx root_ratio = std::sqrt(cplx((L2 - dy2) / (L2 + dy2)));
    const cplx c = L * L2 / std::sqrt(cplx(L2 * L2 - dy2 * dy2));
    const cplx arg = -k_x * c;
    // q_k = H_k(arg) / C_k * root_ratio^k
    cplx prev = 0.0;
    cplx cur = std::pow(std::numbers::pi, -0.25);
    for (int k = 0; k < n; ++k) {
        const cplx next = std::sqrt(2.0 / (k + 1)) * arg * root_ratio * cur -
                          std::sqrt(double(k) / (k + 1)) * root_ratio * root_ratio * prev;
        prev = cur;
        cur = next;
    }
    const double D = reduced_width(packet, L);
    const double dk = k_x - packet.k0x;
    const double envelope =
        std::exp(-0.5 * packet.d_x * packet.d_x * dk * dk) * std::exp(-0.5 * k_x * k_x * D * D);
    const double prefactor = std::sqrt(2.0 * packet.d_y * L * packet.d_x / (L2 + dy2));
    return (prefactor * envelope * cur).real();
}

CoefficientSet coefficient_matrix(const GaussianPacket& packet, const FieldConfig& field,
                                  const CoefficientOptions& options) {
    packet.validate();
    const int n_req = options.n_max;
    if (n_req < 0) throw ConfigError("n_max must be non-negative");
    if (n_req > psi_capacity)
        throw CapacityError("n_max " + std::to_string(n_req) + " exceeds level capacity " +
                            std::to_string(psi_capacity));
    const int order = options.kx_order > 0
                          ? options.kx_order
                          : std::min(gauss_hermite_max_order, std::max(256, n_req + 16));
    const auto k_rule = gauss_hermite(order);

    const double L = field.magnetic_length();
    const double D = reduced_width(packet, L);
    const double dx2 = packet.d_x * packet.d_x;
    const double spread = 1.0 / std::sqrt(dx2 + D * D);
    const double centre = dx2 * packet.k0x * spread * spread;

    CoefficientSet out;
    out.n_requested = n_req;
    out.k_nodes.resize(k_rule.size());
    out.k_weights.resize(k_rule.size());
    for (std::size_t j = 0; j < k_rule.size(); ++j) {
        out.k_nodes[j] = centre + spread * k_rule.nodes[j];
        out.k_weights[j] = spread * k_rule.plain_weights[j];
    }

    const int levels = n_req + 1;
    Eigen::MatrixXd F(Eigen::Index(k_rule.size()), levels);
    parallel_for(k_rule.size(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> row(static_cast<std::size_t>(levels));
        for (std::size_t j = begin; j < end; ++j) {
            amplitudes_by_recurrence(packet, field, out.k_nodes[j], row);
            for (int n = 0; n < levels; ++n) F(Eigen::Index(j), n) = row[std::size_t(n)];
        }
    });

    const Eigen::Map<const Eigen::VectorXd> w(out.k_weights.data(), Eigen::Index(out.k_weights.size()));
    const Eigen::VectorXd diag = (F.array().square().colwise() * w.array()).colwise().sum();

    int n_keep = n_req;
    if (options.auto_truncate) {
        double acc = 0.0;
        for (int n = 0; n < levels; ++n) {
            acc += diag[n];
            if (1.0 - acc < options.truncation_tail) {
                n_keep = n;
                break;
            }
        }
    }
    out.n_max = n_keep;
    out.F_nodes = F.leftCols(n_keep + 1);
    const Eigen::MatrixXd weighted = out.F_nodes.array().colwise() * w.array();
    const Eigen::MatrixXd U = out.F_nodes.transpose() * weighted;
    out.U = U.cast<cplx>();

    double trace = 0.0;
    for (int n = 0; n <= n_keep; ++n) trace += U(n, n);
    out.tail_mass = 1.0 - trace;
    if (out.tail_mass > options.tail_tolerance)
        throw ToleranceError("tail mass " + std::to_string(out.tail_mass) +
                                 " above tolerance at n_max = " + std::to_string(n_req) +
                                 "; increase n_max",
                             out.tail_mass);

    if (std::abs(packet.d_y - L) <= 1e-12 * L) {
        const auto closed = coefficient_matrix_equal_widths(packet, field, n_keep);
        // relative to the largest entry; tiny entries carry roundoff of the big ones
        out.closed_form_deviation =
            (U - closed).cwiseAbs().maxCoeff() / closed.cwiseAbs().maxCoeff();
    }
    return out;
}

Eigen::MatrixXd coefficient_matrix_equal_widths(const GaussianPacket& packet,
                                                const FieldConfig& field, int n_max) {
    const double L = field.magnetic_length();
    const double P = std::sqrt(packet.d_x * packet.d_x + 0.5 * L * L);
    const double z = packet.d_x * packet.d_x * std::abs(packet.k0x) / P;
    const double s = L / (2.0 * std::sqrt(2.0) * P);
    const double k0 = packet.k0x;
    const double log_front = std::log(packet.d_x / P) -
                             packet.d_x * packet.d_x * k0 * k0 * L * L / (2.0 * P * P);

    // log of rho_N = h_N(z) s^N / sqrt(N!), h_N(z) = |H_N(i z)|; rho_N is
    // zero for odd N when z = 0
    const int top = 2 * n_max;
    std::vector<double> log_rho(std::size_t(top) + 1, -INFINITY);
    double prev = 0.0, cur = 1.0, log_scale = 0.0;
    log_rho[0] = 0.0;
    for (int N = 0; N < top; ++N) {
        const double next = (2.0 * z * s * cur + 2.0 * s * s * std::sqrt(double(N)) * prev) /
                            std::sqrt(double(N + 1));
        prev = cur;
        cur = next;
        if (cur > 1e150) {
            cur /= 1e150;
            prev /= 1e150;
            log_scale += std::log(1e150);
        } else if (cur != 0.0 && cur < 1e-150) {
            cur *= 1e150;
            prev *= 1e150;
            log_scale -= std::log(1e150);
        }
        log_rho[std::size_t(N + 1)] = cur > 0.0 ? std::log(cur) + log_scale : -INFINITY;
    }

    Eigen::MatrixXd U(n_max + 1, n_max + 1);
    for (int m = 0; m <= n_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            const int N = m + n;
            const double lr = log_rho[std::size_t(N)];
            if (!std::isfinite(lr)) {
                U(m, n) = 0.0;
                continue;
            }
            const double log_binom =
                0.5 * (std::lgamma(N + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n + 1.0));
            const double sign = (k0 > 0.0 && N % 2 == 1) ? -1.0 : 1.0;
            U(m, n) = sign * std::exp(log_front + lr + log_binom);
        }
    }
    return U;
}

std::complex<double> coefficient_closed(const GaussianPacket& packet, const FieldConfig& field,
                                        int m, int n) {
    const double L = field.magnetic_length();
    if (std::abs(packet.d_y - L) / L < 1e-6)
        throw DomainError("general closed form is singular for d_y = L");
    const double L2 = L * L, dy2 = packet.d_y * packet.d_y;
    const double D = reduced_width(packet, L);
    const double Q = 1.0 / std::sqrt(packet.d_x * packet.d_x + D * D);
    const double W = packet.d_x * D * Q * packet.k0x;
    const double Y = packet.d_x * packet.d_x * packet.k0x * Q;
    const cplx c = L * L2 / std::sqrt(cplx(L2 * L2 - dy2 * dy2));
    const cplx root_ratio = std::sqrt(cplx((L2 - dy2) / (L2 + dy2)));
    const double a0 = std::sqrt(2.0 * std::numbers::pi) * packet.d_y / std::sqrt(L2 + dy2);
    const cplx am = a0 * std::pow(root_ratio, m);
    const cplx an = a0 * std::pow(root_ratio, n);
    const double log_cm = 0.5 * (m * std::numbers::ln2 + std::lgamma(m + 1.0) + 0.5 * std::log(std::numbers::pi));
    const double log_cn = 0.5 * (n * std::numbers::ln2 + std::lgamma(n + 1.0) + 0.5 * std::log(std::numbers::pi));

    // G_N = (1 - (cQ)^2)^{N/2} H_N(X / sqrt(1 - (cQ)^2)) with X = -c Q Y, as
    // the square-root free recurrence G_{N+1} = 2 X G_N - 2 N sigma G_{N-1}
    const cplx sigma = 1.0 - (c * Q) * (c * Q);
    const cplx X = -c * Q * Y;
    const int top = m + n;
    std::vector<cplx> G(std::size_t(top) + 1);
    G[0] = 1.0;
    if (top >= 1) G[1] = 2.0 * X;
    for (int N = 1; N < top; ++N) G[std::size_t(N + 1)] = 2.0 * X * G[std::size_t(N)] - 2.0 * N * sigma * G[std::size_t(N - 1)];

    cplx sum = 0.0;
    for (int l = 0; l <= std::min(m, n); ++l) {
        const double log_coef = l * std::numbers::ln2 + std::lgamma(l + 1.0) +
                                std::lgamma(m + 1.0) - std::lgamma(l + 1.0) - std::lgamma(m - l + 1.0) +
                                std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
        sum += std::exp(log_coef - log_cm - log_cn) * G[std::size_t(top - 2 * l)];
    }
    return am * an * L * Q * packet.d_x * std::sqrt(std::numbers::pi) * std::exp(-W * W) /
           (std::numbers::pi * packet.d_y) * sum;
}

SumRuleReport sum_rules(const CoefficientSet& coeffs, const GaussianPacket& packet,
                        const FieldConfig& field) {
    SumRuleReport r;
    double acc = 0.0, comp = 0.0;
    auto add = [&](double v) {
        const double y = v - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    };
    for (int n = 0; n <= coeffs.n_max; ++n) add(coeffs.U(n, n).real());
    r.normalization = acc;
    acc = comp = 0.0;
    for (int n = 0; n < coeffs.n_max; ++n) add(std::sqrt(n + 1.0) * coeffs.U(n + 1, n).real());
    r.momentum = acc;
    r.momentum_expected = -packet.k0x * field.magnetic_length() / std::sqrt(2.0);
    r.normalization_residual = std::abs(r.normalization - 1.0);
    r.momentum_residual = std::abs(r.momentum - r.momentum_expected);
    r.tail_mass = coeffs.tail_mass;
    return r;
}

}  // namespace zitter
