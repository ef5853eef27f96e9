#include <doctest.h>

#include <cmath>
#include <numbers>

#include "zitter/errors.hpp"
#include "zitter/packet.hpp"
#include "zitter/special.hpp"

using namespace zitter;

namespace {

GaussianPacket planar(double d_x, double d_y, double k0x) {
    GaussianPacket p;
    p.d_x = d_x;
    p.d_y = d_y;
    p.k0x = k0x;
    return p;
}

// composite Simpson on [a, b]
template <class F>
double simpson(F f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("packet validation") {
    auto p = planar(1.5, 1.2, 0.5);
    CHECK_NOTHROW(p.validate());
    p.a1 = 0.5;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("|a1|^2 + |a2|^2 = 1"), ConfigError);
    p = planar(1.5, 1.2, 1.0);
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.bounded_momentum = false;
    CHECK_NOTHROW(p.validate());
    p = planar(-1.0, 1.2, 0.2);
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = planar(1.0, 1.0, 0.2);
    p.k0z = 0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.model = Model::spatial;
    p.d_z = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK(model_from_string("3+1") == Model::spatial);
    CHECK(to_string(Model::planar) == "2+1");
    CHECK_THROWS_AS(model_from_string("1+1"), ConfigError);
}

TEST_CASE("g_xy") {
    const auto p = planar(1.5, 1.2, 0.5);
    CHECK(g_xy(p, 0.5, 0.0) == doctest::Approx(std::sqrt(1.5 / (std::numbers::pi * 1.2))).epsilon(1e-15));
    CHECK(g_xy(p, 0.5 + 1.0 / 1.5, 0.0) ==
          doctest::Approx(g_xy(p, 0.5, 0.0) * std::exp(-0.5)).epsilon(1e-14));
    const double norm = simpson(
        [&](double k) {
            return simpson([&](double y) { return std::pow(g_xy(p, k, y), 2); }, -12.0, 12.0, 400);
        },
        0.5 - 8.0, 0.5 + 8.0, 400);
    CHECK(std::abs(norm - 1.0) < 1e-10);
}

TEST_CASE("g_z") {
    GaussianPacket p = planar(1.0, 1.0, 0.2);
    CHECK_THROWS_AS(g_z(p, 0.0), ConfigError);
    p.model = Model::spatial;
    p.d_z = 1.8;
    p.k0z = 0.3;
    CHECK(g_z(p, 0.3) == doctest::Approx(std::pow(1.8 * 1.8 / std::numbers::pi, 0.25)).epsilon(1e-15));
    auto moment = [&](int power) {
        return simpson([&](double k) { return std::pow(k - 0.3, power) * std::pow(g_z(p, k), 2); },
                       0.3 - 6.0, 0.3 + 6.0, 2000);
    };
    CHECK(std::abs(moment(0) - 1.0) < 1e-12);
    CHECK(std::abs(moment(2) - 1.0 / (2 * 1.8 * 1.8)) < 1e-12);
}

TEST_CASE("F_n against direct integration of the overlap") {
    // independent overlap with the Landau state centred at the guiding centre y = k_x L^2
    const auto p = planar(1.5, 1.2, 0.5);
    const auto f = FieldConfig::from_magnetic_length(1.3);
    const double L = f.magnetic_length();
    for (int n : {0, 1, 4, 7, 20}) {
        for (double k : {-0.4, 0.3, 0.9}) {
            const double ref =
                simpson([&](double y) { return g_xy(p, k, y) * psi(n, (y - k * L * L) / L); }, -30.0, 30.0,
                        6000) /
                std::sqrt(L);
            CAPTURE(n);
            CAPTURE(k);
            CHECK(std::abs(landau_amplitude(p, f, n, k) - ref) < 1e-12);
        }
    }
}

TEST_CASE("F_n closed form and quadrature") {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = planar(1.5, 1.2, 0.5);
    const double q = landau_amplitude_quadrature(p, f, 7, 0.3);
    const double c = landau_amplitude_closed(p, f, 7, 0.3);
    CHECK(std::abs(q - c) <= 1e-8 * std::abs(q));
    const auto wide = planar(1.5, 2.4, 0.5);
    for (int n = 0; n < 12; ++n) {
        const double a = landau_amplitude_quadrature(wide, f, n, -0.2);
        CHECK(std::abs(a - landau_amplitude_closed(wide, f, n, -0.2)) <= 1e-8 * std::max(std::abs(a), 1e-12));
    }
    const auto equal = planar(1.5, 1.0, 0.0);
    CHECK_THROWS_AS(landau_amplitude_closed(equal, f, 2, 0.1), DomainError);
    for (int n : {1, 3, 9}) CHECK(std::abs(landau_amplitude(equal, f, n, 0.0)) < 1e-15);
    std::vector<double> all(10);
    landau_amplitudes(p, f, 0.3, all);
    CHECK(all[7] == doctest::Approx(q).epsilon(1e-12));
    // recurrence against the y quadrature at high levels, absolute
    std::vector<double> high(301);
    for (double k : {-2.0, 0.4, 3.5}) {
        landau_amplitudes(wide, f, k, high);
        for (int n : {50, 150, 300})
            CHECK(std::abs(high[std::size_t(n)] - landau_amplitude_quadrature(wide, f, n, k)) < 1e-13);
    }
}

TEST_CASE("coefficient matrix invariants and sum rules") {
    struct Case {
        double L, d_x, d_y, k0x;
    };
    for (const auto& c : {Case{1.0, 1.5, 1.2, 0.998}, Case{0.1733, 0.156, 0.1733, 0.8},
                          Case{22.36, 22.36, 22.36, 0.02236}, Case{3.0, 2.0, 4.8, 0.3},
                          Case{1.0, 0.63, 0.57, 0.0}}) {
        CAPTURE(c.L);
        const auto p = planar(c.d_x, c.d_y, c.k0x);
        const auto f = FieldConfig::from_magnetic_length(c.L);
        const auto u = coefficient_matrix(p, f);
        const auto r = sum_rules(u, p, f);
        CHECK(r.normalization_residual < 1e-10);
        CHECK(r.momentum_residual < 1e-10);
        CHECK(r.momentum_expected == doctest::Approx(-c.k0x * c.L / std::sqrt(2.0)));
        CHECK(std::abs(r.tail_mass - u.tail_mass) < 1e-15);
        CHECK(std::abs((u.U - u.U.adjoint()).cwiseAbs().maxCoeff()) < 1e-12);
        CHECK(u.U.imag().cwiseAbs().maxCoeff() < 1e-10);
        for (int n = 0; n <= u.n_max; ++n) CHECK(u.U(n, n).real() >= -1e-12);
        if (c.k0x == 0.0) CHECK(std::abs(r.momentum) < 1e-12);
    }
}

TEST_CASE("equal-width closed form agrees with quadrature") {
    const auto f = FieldConfig::from_magnetic_length(1.4);
    const auto p = planar(1.1, 1.4, 0.6);
    const auto u = coefficient_matrix(p, f);
    REQUIRE(u.closed_form_deviation.has_value());
    CHECK(*u.closed_form_deviation < 1e-12);
    const auto closed = coefficient_matrix_equal_widths(p, f, u.n_max);
    for (int m = 0; m <= u.n_max; ++m)
        for (int n = 0; n <= u.n_max; ++n)
            if (std::abs(closed(m, n)) > 1e-12)
                CHECK(std::abs(u.U(m, n).real() - closed(m, n)) <= 1e-8 * std::abs(closed(m, n)));
}

TEST_CASE("general closed form for small indices") {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    for (double d_y : {0.7, 1.6}) {
        const auto p = planar(1.3, d_y, 0.4);
        const auto u = coefficient_matrix(p, f);
        for (int m = 0; m < 6; ++m)
            for (int n = 0; n < 6; ++n) {
                const auto c = coefficient_closed(p, f, m, n);
                CHECK(std::abs(c - u.U(m, n)) < 1e-10);
            }
    }
    CHECK_THROWS_AS(coefficient_closed(planar(1.0, 1.0, 0.1), f, 1, 1), DomainError);
}

TEST_CASE("support sits at low levels when all lengths match") {
    const auto f = FieldConfig::from_magnetic_length(2.0);
    const auto u = coefficient_matrix(planar(2.0, 2.0, 0.5), f);
    int best = 0;
    for (int n = 0; n <= u.n_max; ++n)
        if (u.U(n, n).real() > u.U(best, best).real()) best = n;
    CHECK(best <= 3);
}

TEST_CASE("truncation honesty") {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = planar(6.0, 6.0, 0.998);
    CoefficientOptions o;
    o.auto_truncate = false;
    o.tail_tolerance = 1.0;
    double previous = 0.0;
    for (int n_max : {5, 10, 20, 40, 80}) {
        o.n_max = n_max;
        const auto u = coefficient_matrix(p, f, o);
        const double sum = 1.0 - u.tail_mass;
        CHECK(sum >= previous);
        previous = sum;
        double trace = 0.0;
        for (int n = 0; n <= u.n_max; ++n) trace += u.U(n, n).real();
        CHECK(std::abs(trace - sum) < 1e-14);
    }
    o.n_max = 5;
    o.tail_tolerance = 1e-10;
    try {
        coefficient_matrix(p, f, o);
        FAIL("expected a truncation error");
    } catch (const ToleranceError& e) {
        CHECK(std::string(e.what()).find("increase n_max") != std::string::npos);
        CHECK(e.achieved() > 0.1);
    }
    o.n_max = 451;
    CHECK_THROWS_AS(coefficient_matrix(p, f, o), CapacityError);
}
