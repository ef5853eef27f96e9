#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "zitter/dynamics.hpp"
#include "zitter/errors.hpp"
#include "zitter/landau.hpp"
#include "zitter/packet.hpp"

using namespace zitter;

namespace {

GaussianPacket packet(Model model, double d_x, double d_y, double d_z, double k0x, double k0z = 0.0) {
    GaussianPacket p;
    p.model = model;
    p.d_x = d_x;
    p.d_y = d_y;
    p.d_z = d_z;
    p.k0x = k0x;
    p.k0z = k0z;
    return p;
}

std::vector<double> grid(double t0, double t1, int count) {
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = t0 + (t1 - t0) * i / (count - 1);
    return t;
}

double winding(const std::vector<std::complex<double>>& z) {
    double total = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) total += std::arg(z[i] / z[i - 1]);
    return total / (2 * std::numbers::pi);
}

const auto fig1_field = FieldConfig::from_magnetic_length(1.0);

}  // namespace

TEST_CASE("trajectories start at the origin") {
    for (auto model : {Model::planar, Model::spatial}) {
        auto p = packet(model, 1.5, 1.2, 1.8, 0.998);
        const auto u = coefficient_matrix(p, fig1_field);
        const std::vector<double> t{0.0, 1.0};
        const auto tr = trajectory(p, u, fig1_field, t);
        CHECK(std::abs(tr.x[0]) < 1e-10);
        CHECK(std::abs(tr.y[0]) < 1e-10);
        CHECK(tr.appendix_offset == doctest::Approx(-0.998));
        CHECK(std::abs(tr.offset_residual) < 1e-8);
        CHECK(std::abs(tr.y_offset - 0.998) < 1e-8);
    }
}

TEST_CASE("low-field circle") {
    const auto f = FieldConfig::from_kappa(1e-3);
    const double L = f.magnetic_length();
    const auto p = packet(Model::planar, L, L, 0.0, 0.5 / L);
    const auto u = coefficient_matrix(p, f);
    const double period = 2 * std::numbers::pi / f.omega_cyclotron();
    const auto t = grid(0.0, period, 801);
    const auto tr = trajectory_2p1(p, u, f, t);
    // RMS residual relative to the RMS of the circle itself
    const double R = p.k0x * L * L;
    double se = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ph = f.omega_cyclotron() * t[i];
        const double cy = R * (1 - std::cos(ph)), cx = R * std::sin(ph);
        se += std::pow(tr.y[i] - cy, 2) + std::pow(tr.x[i] - cx, 2);
        ss += cy * cy + cx * cx;
    }
    CHECK(std::sqrt(se / ss) < 0.01);
}

TEST_CASE("3+1 with a very long packet along z reduces to 2+1") {
    auto p3 = packet(Model::spatial, 1.5, 1.2, 4000.0, 0.998);
    auto p2 = packet(Model::planar, 1.5, 1.2, 0.0, 0.998);
    const auto u = coefficient_matrix(p2, fig1_field);
    const auto t = grid(0.0, 30.0, 61);
    const auto a = trajectory_3p1(p3, u, fig1_field, t);
    const auto b = trajectory_2p1(p2, u, fig1_field, t);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        worst = std::max({worst, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])});
        scale = std::max({scale, std::abs(b.x[i]), std::abs(b.y[i])});
    }
    CHECK(worst / scale < 1e-6);
    CHECK_THROWS_AS(trajectory_3p1(p2, u, fig1_field, t), ConfigError);
    CHECK_THROWS_AS(trajectory_2p1(p3, u, fig1_field, t), ConfigError);
}

TEST_CASE("mixing terms vanish without motion along the field") {
    auto p = packet(Model::spatial, 2.0, 1.8, 1.5, 0.673);
    p.a1 = 0.6;
    p.a2 = {0.4, std::sqrt(0.48)};
    const auto u = coefficient_matrix(p, fig1_field);
    const auto t = grid(0.0, 20.0, 41);
    const auto m = mixing_terms(p, u, fig1_field, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(m.plus[i]) < 1e-12);
        CHECK(std::abs(m.minus[i]) < 1e-12);
    }
    auto q = packet(Model::planar, 2.0, 1.8, 0.0, 0.673);
    q.a1 = p.a1;
    q.a2 = p.a2;
    const auto m2 = mixing_terms(q, u, fig1_field, t);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(m2.plus[i] + m2.minus[i]) == 0.0);

    p.k0z = 0.3;
    const auto m3 = mixing_terms(p, u, fig1_field, t);
    double largest = 0.0;
    for (const auto& z : m3.plus) largest = std::max(largest, std::abs(z));
    CHECK(largest > 1e-4);
}

TEST_CASE("velocities") {
    const auto p = packet(Model::planar, 1.5, 1.2, 0.0, 0.998);
    const auto u = coefficient_matrix(p, fig1_field);
    const std::vector<double> t0{0.0};
    const auto v0 = velocities(p, u, fig1_field, t0);
    // alpha is off-diagonal in the spinor index, so an upper-component
    // packet starts at rest: both kernel sums cancel at t = 0
    CHECK(std::abs(v0.vy[0]) < 1e-14);
    CHECK(std::abs(v0.vx[0]) < 1e-12);

    // centred differences, step 1e-3 t_c
    const double h = 1e-3;
    std::vector<double> t;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(i - h);
        t.push_back(i + h);
    }
    const auto tr = trajectory_2p1(p, u, fig1_field, t);
    std::vector<double> mid;
    for (int i = 0; i <= 200; ++i) mid.push_back(i);
    const auto v = velocities(p, u, fig1_field, mid);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double dx = (tr.x[2 * i + 1] - tr.x[2 * i]) / (2 * h);
        const double dy = (tr.y[2 * i + 1] - tr.y[2 * i]) / (2 * h);
        worst = std::max({worst, std::abs(dx - v.vx[i]), std::abs(dy - v.vy[i])});
        CHECK(std::hypot(v.vx[i], v.vy[i]) <= 1.0 + 1e-9);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("T factors") {
    CHECK(t_factor(1, 1, 1, 1, 1.5, 2.0) == doctest::Approx(1 + 1 / 1.5 + 1 / 2.0 + 1.5 / 2.0));
    CHECK(t_factor(1, -1, 1, -1, 1.5, 2.0) == doctest::Approx(1 - 1 / 1.5 + 1 / 2.0 - 1.5 / 2.0));
    // both energies near mc^2: the ZB weight of <A_1> vanishes
    CHECK(std::abs(t_factor(1, -1, 1, -1, 1.0 + 1e-9, 1.0 + 2e-9)) < 1e-8);
}

TEST_CASE("sub-packets recombine into the trajectory") {
    const auto f = FieldConfig::from_magnetic_length(1.0);
    const auto p = packet(Model::planar, 1.5, 1.2, 0.0, 0.998);
    const auto u = coefficient_matrix(p, f);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> time(0.0, 300.0);
    std::vector<double> t(500);
    for (auto& v : t) v = time(rng);
    const auto s = subpackets(p, u, f, t);
    const auto tr = trajectory_2p1(p, u, f, t);
    const double L = f.magnetic_length();
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto sum = s.lower_positive[i] + s.lower_negative[i] + s.raise_positive[i] + s.raise_negative[i];
        const double y = L / std::sqrt(2.0) * sum.real();
        const double osc = (tr.cyclotron[i] + tr.zitter[i]).real();
        worst = std::max(worst, std::abs(y - osc));
        CHECK(std::abs(sum.imag()) < 1e-12);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("non-relativistic sub-packets carry only the cyclotron motion") {
    const auto f = FieldConfig::from_kappa(1e-6);
    const double L = f.magnetic_length();
    const auto p = packet(Model::planar, L, L, 0.0, 0.5 / L);
    const auto u = coefficient_matrix(p, f);
    const auto t = grid(0.0, 50.0, 11);
    const auto s = subpackets(p, u, f, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(s.lower_negative[i]) < 1e-5 * std::abs(s.lower_positive[i]));
        CHECK(std::abs(s.raise_negative[i]) < 1e-5 * std::abs(s.raise_positive[i]));
    }
}

TEST_CASE("sub-packets wind in opposite directions in the trap regime of the last figure") {
    // Omega = 2 pi 4 kHz gives kappa = (0.06 * 68 / 4)^2
    const auto f = FieldConfig::from_kappa(std::pow(0.06 * 68.0 / 4.0, 2));
    const auto p = packet(Model::planar, 0.63, 0.57, 0.0, 0.999);
    const auto u = coefficient_matrix(p, f);
    const auto t = grid(0.0, 2 * std::numbers::pi * 4000.0 * 8e-3, 4001);
    const auto s = subpackets(p, u, f, t);
    const double a = winding(s.lower_positive), d = winding(s.raise_positive);
    CHECK(std::abs(a) > 1.0);
    CHECK(a * d < 0.0);
}

TEST_CASE("spectral decomposition") {
    const auto f = FieldConfig::from_kappa(16.65);
    const double L = f.magnetic_length();
    auto p = packet(Model::planar, 0.9 * L, L, 0.0, std::sqrt(2.0) / L);
    p.bounded_momentum = false;
    p.a1 = p.a2 = std::sqrt(0.5);
    const auto u = coefficient_matrix(p, f);
    const auto lines = spectral_decomposition(p, u, f);
    REQUIRE(!lines.empty());
    double cyc = 0.0, zb = 0.0;
    int zb_lines = 0;
    bool anisotropic = false;
    for (const auto& l : lines) {
        CHECK(l.frequency > 0.0);
        const double amp = std::max(l.amplitude_x, l.amplitude_y);
        if (l.kind == LineKind::cyclotron) {
            cyc = std::max(cyc, amp);
            CHECK(l.frequency == doctest::Approx(mode_frequencies(l.n, 0.0, f).cyclotron));
        } else {
            zb = std::max(zb, amp);
            if (amp > 1e-3 * L) ++zb_lines;
            CHECK(l.frequency == doctest::Approx(mode_frequencies(l.n, 0.0, f).zitter));
            CHECK(l.frequency > mode_frequencies(l.n, 0.0, f).cyclotron);
        }
        if (std::abs(l.amplitude_x - l.amplitude_y) > 1e-6 * amp) anisotropic = true;
    }
    CHECK(zb_lines >= 3);
    CHECK(zb > 0.1 * cyc);
    CHECK(anisotropic);

    // reconstruction
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> time(0.0, 400.0);
    std::vector<double> t(100);
    for (auto& v : t) v = time(rng);
    const auto tr = trajectory_2p1(p, u, f, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::complex<double> z{};
        for (const auto& l : lines) z += l.cos_part * std::cos(l.frequency * t[i]) + l.sin_part * std::sin(l.frequency * t[i]);
        worst = std::max(worst, std::abs(z - (tr.cyclotron[i] + tr.zitter[i])));
    }
    CHECK(worst < 1e-10);

    // low field: every interband line sits at 2 mc^2 / hbar
    const auto weak = FieldConfig::from_kappa(1e-8);
    const double Lw = weak.magnetic_length();
    const auto q = packet(Model::planar, Lw, Lw, 0.0, 0.5 / Lw);
    const auto uw = coefficient_matrix(q, weak);
    for (const auto& l : spectral_decomposition(q, uw, weak))
        if (l.kind == LineKind::zitter) CHECK(std::abs(l.frequency - 2.0) < 1e-6);
}

TEST_CASE("2+1 spectrum has peaks only at line frequencies") {
    const auto f = FieldConfig::from_kappa(0.1156);
    const double L = f.magnetic_length();
    const auto p = packet(Model::planar, L, L, 0.0, std::sqrt(2.0) / L);
    const auto u = coefficient_matrix(p, f);
    const auto lines = spectral_decomposition(p, u, f);
    const int count = 8192;
    const double T = 4000.0;
    const auto t = grid(0.0, T, count);
    const auto tr = trajectory_2p1(p, u, f, t);
    double mean = 0.0;
    for (double v : tr.y) mean += v / count;
    // Blackman-Harris periodogram of y on a frequency grid; sidelobes sit
    // below -92 dB, the main lobe spans 4 bins either side
    const double dw = 2 * std::numbers::pi / T;
    std::vector<double> power;
    for (double w = 0.5 * dw; w < 4.0; w += 0.25 * dw) {
        std::complex<double> s{};
        for (int i = 0; i < count; ++i) {
            const double x = 2 * std::numbers::pi * i / (count - 1);
            const double win = 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2 * x) -
                               0.01168 * std::cos(3 * x);
            s += win * (tr.y[i] - mean) * std::polar(1.0, -w * t[i]);
        }
        power.push_back(std::norm(s));
    }
    const double top = *std::max_element(power.begin(), power.end());
    for (std::size_t k = 1; k + 1 < power.size(); ++k) {
        if (power[k] < 1e-6 * top || power[k] < power[k - 1] || power[k] < power[k + 1]) continue;
        const double w = (0.5 + 0.25 * k) * dw;
        double nearest = 1e9;
        for (const auto& l : lines) nearest = std::min(nearest, std::abs(l.frequency - w));
        CAPTURE(w);
        CHECK(nearest < 4.0 * dw);
    }
}

TEST_CASE("low-field summary") {
    const auto f = FieldConfig::from_tesla(20.0);
    const auto u = UnitSystem::physical_electron();
    const double k0x = 8.72e7 * u.compton_length();
    auto p = packet(Model::spatial, 20000, 18000, 15000, k0x);
    const auto s = lowfield_summary(p, f);
    CHECK(u.length_to_si(s.zitter_amplitude) / si::angstrom == doctest::Approx(6.5e-8).epsilon(0.1));
    CHECK(s.cyclotron_radius == doctest::Approx(k0x * std::pow(f.magnetic_length(), 2)));
    CHECK_FALSE(s.warning.has_value());
    CHECK(s.envelope(0.0) == 1.0);
    CHECK(s.envelope(1e12) == doctest::Approx(15000.0 / std::sqrt(1e12)).epsilon(1e-6));
    p.k0x = 0.0;
    const auto z = lowfield_summary(p, f);
    CHECK(z.cyclotron_radius == 0.0);
    CHECK(z.zitter_amplitude == 0.0);
    CHECK(lowfield_summary(p, FieldConfig::from_kappa(0.5)).warning.has_value());
}
