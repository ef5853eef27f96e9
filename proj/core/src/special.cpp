#include "zitter/special.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "zitter/errors.hpp"

namespace zitter {

namespace {

constexpr double rescale_above = 1e150;
constexpr int table_size = 1024;

struct RecurrenceTable {
    std::array<double, table_size> up{};    // sqrt(2 / (k + 1))
    std::array<double, table_size> down{};  // sqrt(k / (k + 1))
    RecurrenceTable() {
        for (int k = 0; k < table_size; ++k) {
            up[k] = std::sqrt(2.0 / (k + 1));
            down[k] = std::sqrt(double(k) / (k + 1));
        }
    }
};

const RecurrenceTable& recurrence_table() {
    static const RecurrenceTable table;
    return table;
}

// Runs the normalized recurrence up to level n_max, handing each level to
// sink(level, value). Values are carried as mantissa * exp(log_scale) so
// that psi_0 underflowing at large |xi| does not zero the whole column.
template <class Sink>
void hermite_recurrence(int n_max, double xi, Sink&& sink) {
    double log_scale = -0.5 * xi * xi;
    double factor = std::exp(log_scale);
    auto emit = [&](int k, double mantissa) {
        if (log_scale > -650.0 || mantissa == 0.0) {
            sink(k, mantissa * factor);
        } else {
            const double mag = std::exp(std::log(std::abs(mantissa)) + log_scale);
            sink(k, mantissa < 0.0 ? -mag : mag);
        }
    };
    const auto& tab = recurrence_table();
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    emit(0, cur);
    for (int k = 0; k < n_max; ++k) {
        const double next = tab.up[k] * xi * cur - tab.down[k] * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > rescale_above) {
            cur /= rescale_above;
            prev /= rescale_above;
            log_scale += std::log(rescale_above);
            factor = std::exp(log_scale);
        }
        emit(k + 1, cur);
    }
}

// psi_{n} and psi_{n-1} up to a common positive factor.
std::pair<double, double> scaled_pair(int n, double xi) {
    const auto& tab = recurrence_table();
    double prev = 0.0, cur = 1.0;
    for (int k = 0; k < n; ++k) {
        const double next = tab.up[k] * xi * cur - tab.down[k] * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > rescale_above) {
            cur /= rescale_above;
            prev /= rescale_above;
        }
    }
    return {cur, prev};
}

double psi_unchecked(int n, double xi) {
    double value = 0.0;
    hermite_recurrence(n, xi, [&](int k, double v) {
        if (k == n) value = v;
    });
    return value;
}

}  // namespace

double psi(int n, double xi) {
    if (n < 0) throw ConfigError("oscillator level must be non-negative");
    if (n > psi_capacity)
        throw CapacityError("oscillator level " + std::to_string(n) + " exceeds capacity " +
                            std::to_string(psi_capacity));
    return psi_unchecked(n, xi);
}

void psi_levels(double xi, std::span<double> out) {
    if (out.empty()) return;
    const int n_max = int(out.size()) - 1;
    if (n_max > psi_capacity)
        throw CapacityError("oscillator level " + std::to_string(n_max) + " exceeds capacity " +
                            std::to_string(psi_capacity));
    hermite_recurrence(n_max, xi, [&](int k, double v) { out[k] = v; });
}

QuadratureRule gauss_hermite(int order) {
    if (order < 2 || order > gauss_hermite_max_order)
        throw CapacityError("gauss-hermite order " + std::to_string(order) + " outside [2, 512]");

    // Golub-Welsch eigenvalues as starting points, polished by Newton on
    // the Hermite function psi_N.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd guess = solver.eigenvalues();

    QuadratureRule rule;
    rule.kind = QuadratureKind::gauss_hermite;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    rule.plain_weights.resize(order);

    const int half = order / 2;
    for (int i = 0; i < half; ++i) {
        // largest roots first; the rest follow by symmetry
        double x = 0.5 * (guess[order - 1 - i] - guess[i]);
        for (int iter = 0; iter < 50; ++iter) {
            const auto [pn, pm] = scaled_pair(order, x);
            const double dx = pn / (std::sqrt(2.0 * order) * pm - x * pn);
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        // w exp(x^2) = 1 / (N psi_{N-1}(x)^2)
        const double p = psi_unchecked(order - 1, x);
        const double plain = 1.0 / (order * p * p);
        const double w = plain * std::exp(-x * x);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.plain_weights[order - 1 - i] = rule.plain_weights[i] = plain;
        rule.weights[order - 1 - i] = rule.weights[i] = w;
    }
    if (order % 2 == 1) {
        const double p = psi_unchecked(order - 1, 0.0);
        rule.nodes[half] = 0.0;
        rule.plain_weights[half] = rule.weights[half] = 1.0 / (order * p * p);
    }
    return rule;
}

QuadratureRule clenshaw_curtis(double a, double b, int panels, int order) {
    if (panels < 1 || order < 2 || order % 2 != 0)
        throw ConfigError("clenshaw-curtis needs panels >= 1 and an even order >= 2");
    // reference rule on [-1, 1]
    std::vector<double> x(order + 1), w(order + 1);
    const double n = order;
    for (int j = 0; j <= order; ++j) {
        x[j] = -std::cos(std::numbers::pi * j / n);
        double s = 0.0;
        for (int k = 1; k <= order / 2; ++k) {
            const double bk = (k == order / 2) ? 1.0 : 2.0;
            s += bk / (4.0 * k * k - 1.0) * std::cos(2.0 * k * std::numbers::pi * j / n);
        }
        const double cj = (j == 0 || j == order) ? 1.0 : 2.0;
        w[j] = cj / n * (1.0 - s);
    }

    QuadratureRule rule;
    rule.kind = QuadratureKind::adaptive_clenshaw;
    const double h = (b - a) / panels;
    rule.nodes.reserve(std::size_t(panels) * order + 1);
    rule.weights.reserve(rule.nodes.capacity());
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int j = 0; j <= order; ++j) {
            const double weight = 0.5 * h * w[j];
            if (j == 0 && p > 0) {
                // shared endpoint with the previous panel
                rule.weights.back() += weight;
                continue;
            }
            rule.nodes.push_back(lo + 0.5 * h * (x[j] + 1.0));
            rule.weights.push_back(weight);
        }
    }
    rule.plain_weights = rule.weights;
    return rule;
}

double log_factorial_ratio(int m, int n) {
    if (m < 0 || n < 0) throw ConfigError("levels must be non-negative");
    if (m == n) return 0.0;
    const int lo = std::min(m, n), hi = std::max(m, n);
    // ln(C_hi / C_lo) = ((hi - lo) ln 2 + sum_{k=lo+1}^{hi} ln k) / 2
    double acc = 0.0, comp = 0.0;
    for (int k = lo + 1; k <= hi; ++k) {
        const double y = std::log(double(k)) - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    const double value = 0.5 * ((hi - lo) * std::numbers::ln2 + acc);
    return m > n ? value : -value;
}

}  // namespace zitter
