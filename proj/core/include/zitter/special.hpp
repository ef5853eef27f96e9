#pragma once

#include <span>
#include <vector>

namespace zitter {

inline constexpr int psi_capacity = 450;

// Normalized Hermite function psi_n(xi) = H_n(xi) exp(-xi^2/2) / C_n,
// C_n = sqrt(2^n n! sqrt(pi)), by the normalized three-term recurrence.
double psi(int n, double xi);

// psi_0 .. psi_{out.size()-1} at xi in one pass.
void psi_levels(double xi, std::span<double> out);

enum class QuadratureKind { gauss_hermite, adaptive_clenshaw };

struct QuadratureRule {
    std::vector<double> nodes;
    // gauss-hermite: integrate against exp(-x^2); clenshaw: plain weights
    std::vector<double> weights;
    // weights for integrating f(x) dx directly (w_i exp(x_i^2) for
    // gauss-hermite, identical to weights otherwise); never underflow
    std::vector<double> plain_weights;
    QuadratureKind kind = QuadratureKind::gauss_hermite;

    std::size_t size() const noexcept { return nodes.size(); }
};

inline constexpr int gauss_hermite_max_order = 512;

QuadratureRule gauss_hermite(int order);

// Composite Clenshaw-Curtis rule on [a, b] with `panels` equal panels of
// `order` + 1 points each (shared panel endpoints merged).
QuadratureRule clenshaw_curtis(double a, double b, int panels, int order = 16);

// ln(C_m / C_n)
double log_factorial_ratio(int m, int n);

}  // namespace zitter
