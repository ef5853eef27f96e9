#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "zitter/errors.hpp"
#include "zitter/special.hpp"

using namespace zitter;

namespace {
const double sqrt_pi = std::sqrt(std::numbers::pi);
}

TEST_CASE("psi at the origin") {
    CHECK(psi(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(psi(1, 0.0) == 0.0);
}

TEST_CASE("psi at level 400 against a 50-digit reference") {
    // mpmath: hermite(400, 3.7) exp(-3.7^2/2) / sqrt(2^400 400! sqrt(pi))
    const double ref = -0.11066133323418461931573660160036564357991067196379;
    CHECK(std::abs(psi(400, 3.7) - ref) / std::abs(ref) < 1e-11);
}

TEST_CASE("psi stays finite at the edges of the stated range") {
    for (int n : {0, 100, 450})
        for (double xi : {-40.0, -20.0, 0.5, 40.0}) CHECK(std::isfinite(psi(n, xi)));
    CHECK_THROWS_AS(psi(451, 0.0), CapacityError);
    CHECK_THROWS_AS(psi(-1, 0.0), ConfigError);
}

TEST_CASE("psi_levels matches psi") {
    std::vector<double> levels(60);
    psi_levels(2.3, levels);
    for (int n = 0; n < 60; ++n) CHECK(levels[n] == doctest::Approx(psi(n, 2.3)).epsilon(1e-14));
}

TEST_CASE("three-term recurrence residual") {
    double worst = 0.0;
    std::vector<double> p(402);
    for (double xi = -20.0; xi <= 20.0; xi += 0.37) {
        psi_levels(xi, p);
        for (int n = 1; n <= 400; ++n) {
            const double r = p[n + 1] * std::sqrt(2.0 * (n + 1)) - 2.0 * xi * p[n] +
                             std::sqrt(2.0 * n) * p[n - 1];
            worst = std::max(worst, std::abs(r));
        }
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("gauss-hermite order 2 closed form") {
    const auto r = gauss_hermite(2);
    REQUIRE(r.size() == 2);
    CHECK(r.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(r.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    for (double w : r.weights) CHECK(w == doctest::Approx(sqrt_pi / 2).epsilon(1e-15));
}

TEST_CASE("gauss-hermite moments and transforms") {
    const auto r8 = gauss_hermite(8);
    double m2 = 0.0;
    for (std::size_t i = 0; i < r8.size(); ++i) m2 += r8.weights[i] * r8.nodes[i] * r8.nodes[i];
    CHECK(std::abs(m2 - sqrt_pi / 2) < 1e-14);

    const auto r64 = gauss_hermite(64);
    double c = 0.0;
    for (std::size_t i = 0; i < r64.size(); ++i) c += r64.weights[i] * std::cos(3.0 * r64.nodes[i]);
    CHECK(std::abs(c - sqrt_pi * std::exp(-9.0 / 4.0)) < 1e-10);
}

TEST_CASE("gauss-hermite weights") {
    for (int order : {2, 16, 64, 256, 400, 512}) {
        CAPTURE(order);
        const auto r = gauss_hermite(order);
        double sum = 0.0;
        for (double w : r.weights) sum += w;
        CHECK(std::abs(sum - sqrt_pi) / sqrt_pi < 1e-12);
        for (double w : r.plain_weights) CHECK(w > 0.0);
        if (order <= 256)
            for (double w : r.weights) CHECK(w > 0.0);
    }
    CHECK_THROWS_AS(gauss_hermite(1), CapacityError);
    CHECK_THROWS_AS(gauss_hermite(513), CapacityError);
}

TEST_CASE("orthonormality of psi under gauss-hermite(256)") {
    const auto r = gauss_hermite(256);
    std::vector<std::vector<double>> p(r.size(), std::vector<double>(101));
    for (std::size_t i = 0; i < r.size(); ++i) psi_levels(r.nodes[i], p[i]);
    double worst = 0.0;
    for (int m = 0; m <= 100; ++m)
        for (int n = 0; n <= m; ++n) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) s += r.plain_weights[i] * p[i][m] * p[i][n];
            worst = std::max(worst, std::abs(s - (m == n ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("orthonormality up to level 400 under the largest rule") {
    const auto r = gauss_hermite(512);
    std::vector<std::vector<double>> p(r.size(), std::vector<double>(401));
    for (std::size_t i = 0; i < r.size(); ++i) psi_levels(r.nodes[i], p[i]);
    double worst = 0.0;
    for (int m : {0, 1, 57, 199, 300, 399, 400})
        for (int n = 0; n <= 400; ++n) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) s += r.plain_weights[i] * p[i][m] * p[i][n];
            worst = std::max(worst, std::abs(s - (m == n ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("clenshaw-curtis integrates smooth functions") {
    const auto r = clenshaw_curtis(-1.0, 2.0, 3, 16);
    CHECK(r.kind == QuadratureKind::adaptive_clenshaw);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::exp(r.nodes[i]);
    CHECK(std::abs(s - (std::exp(2.0) - std::exp(-1.0))) < 1e-13);
    for (double w : r.weights) CHECK(w > 0.0);
    CHECK_THROWS_AS(clenshaw_curtis(0.0, 1.0, 0), ConfigError);
}

TEST_CASE("log_factorial_ratio") {
    CHECK(log_factorial_ratio(7, 7) == 0.0);
    CHECK(log_factorial_ratio(1, 0) == doctest::Approx(std::log(std::sqrt(2.0))).epsilon(1e-15));
    // mpmath: (400 ln 2 + lgamma(401) - 200 ln 2 - lgamma(201)) / 2
    const double ref = 637.94907345141248875209718720090313563229522793871;
    CHECK(std::abs(log_factorial_ratio(400, 200) - ref) / ref < 1e-12);
    CHECK(log_factorial_ratio(200, 400) == doctest::Approx(-ref).epsilon(1e-12));
    CHECK(std::isfinite(log_factorial_ratio(1000, 0)));
}
