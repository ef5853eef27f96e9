#include "zitter/landau.hpp"

#include <cmath>
#include <string>

#include "zitter/errors.hpp"

namespace zitter {

namespace {

// (hbar omega_n)^2 + p_z^2, i.e. E^2 - 1
double excitation_sq(int n, double k_z, const FieldConfig& field) {
    const double w = field.omega();
    return w * w * n + k_z * k_z;
}

bool same_momentum(const LandauIndex& a, const LandauIndex& b) {
    return a.k_x == b.k_x && a.k_z == b.k_z;
}

// <bra|a|ket> at t = 0 for ket.n == bra.n + 1, from the closed form of the
// spinor overlaps.
double lowering_overlap(const LandauIndex& bra, const LandauIndex& ket, const FieldConfig& field) {
    const auto u = jl_spinor(bra, field);
    const auto v = jl_spinor(ket, field);
    const int n = bra.n;
    const double s1 = 0.5 * (bra.s + 1), s2 = 0.5 * (bra.s - 1);
    const double t1 = 0.5 * (ket.s + 1), t2 = 0.5 * (ket.s - 1);
    const double w = field.omega();
    const double wn = w * std::sqrt(double(n));
    const double wn1 = w * std::sqrt(double(n + 1));
    const double p = bra.k_z;
    // chi / N = eps E + 1
    const double a = u.chi / u.norm_constant;
    const double b = v.chi / v.norm_constant;
    const double rn = std::sqrt(double(n)), rn1 = std::sqrt(double(n + 1));
    const double sum = s1 * t1 * a * b * rn + s2 * t2 * a * b * rn1 +
                       (s1 * p - s2 * wn) * (t1 * p - t2 * wn1) * rn +
                       (s1 * wn + s2 * p) * (t1 * wn1 + t2 * p) * rn1;
    return u.norm_constant * v.norm_constant * sum;
}

}  // namespace

void LandauIndex::validate() const {
    if (n < 0) throw ConfigError("Landau level must be non-negative");
    if (epsilon != 1 && epsilon != -1) throw ConfigError("energy branch must be +1 or -1");
    if (s != 1 && s != -1) throw ConfigError("spin label must be +1 or -1");
    if (s == 1 && n == 0) throw DomainError("s = +1 state requires n >= 1");
}

double landau_energy(int n, double k_z, const FieldConfig& field) {
    return std::sqrt(1.0 + excitation_sq(n, k_z, field));
}

double landau_gap(int n, double k_z, const FieldConfig& field) {
    const double w = field.omega();
    return w * w / (landau_energy(n, k_z, field) + landau_energy(n + 1, k_z, field));
}

ModeFrequencies mode_frequencies(int n, double k_z, const FieldConfig& field) {
    return {landau_gap(n, k_z, field),
            landau_energy(n, k_z, field) + landau_energy(n + 1, k_z, field)};
}

SpinorWeights jl_spinor(const LandauIndex& idx, const FieldConfig& field) {
    idx.validate();
    const double x2 = excitation_sq(idx.n, idx.k_z, field);
    const double e = std::sqrt(1.0 + x2);
    // eps E + 1 and E + eps, both written to avoid cancellation on the
    // negative branch
    const double epe1 = idx.epsilon > 0 ? e + 1.0 : -x2 / (e + 1.0);
    const double epe = idx.epsilon > 0 ? e + 1.0 : x2 / (e + 1.0);
    if (!(epe > 0.0)) throw DomainError("spinor norm singular at branch-edge state");

    SpinorWeights out;
    out.n = idx.n;
    out.norm_constant = 1.0 / std::sqrt(2.0 * e * epe);
    out.chi = epe1 * out.norm_constant;
    out.eta = idx.epsilon / (2.0 * e);

    const double s1 = 0.5 * (idx.s + 1), s2 = 0.5 * (idx.s - 1);
    const double wn = field.omega() * std::sqrt(double(idx.n));
    const double p = idx.k_z;
    const double nc = out.norm_constant;
    out.components = {nc * s1 * epe1, nc * s2 * epe1, nc * (s1 * p - s2 * wn),
                      -nc * (s1 * wn + s2 * p)};
    return out;
}

LadderElement ladder_matrix_element(double t, const LandauIndex& bra, const LandauIndex& ket,
                                    const FieldConfig& field) {
    bra.validate();
    ket.validate();
    LadderElement out;
    if (!same_momentum(bra, ket)) return out;

    using namespace std::complex_literals;
    if (ket.n == bra.n + 1) {
        out.kind = LadderKind::lowering;
        const double a0 = lowering_overlap(bra, ket, field);
        const double e = landau_energy(bra.n, bra.k_z, field);
        const double lambda = landau_energy(ket.n, ket.k_z, field);
        const double phase1 = bra.epsilon * e - lambda;
        const double phase2 = bra.epsilon * e + lambda;
        out.first = 0.5 * std::exp(1i * phase1 * t) * double(1 + ket.epsilon) * a0;
        out.second = 0.5 * std::exp(1i * phase2 * t) * double(1 - ket.epsilon) * a0;
    } else if (ket.n + 1 == bra.n) {
        out.kind = LadderKind::raising;
        // <bra|a^dagger|ket> = <ket|a|bra>, all amplitudes being real
        const double a0 = lowering_overlap(ket, bra, field);
        const double e = landau_energy(ket.n, ket.k_z, field);
        const double lambda = landau_energy(bra.n, bra.k_z, field);
        const double phase1 = lambda - ket.epsilon * e;
        const double phase2 = -lambda - ket.epsilon * e;
        out.first = 0.5 * std::exp(1i * phase1 * t) * double(1 + bra.epsilon) * a0;
        out.second = 0.5 * std::exp(1i * phase2 * t) * double(1 - bra.epsilon) * a0;
    }
    return out;
}

LadderElement ladder_heisenberg_element(double t, const LandauIndex& bra, const LandauIndex& ket,
                                        const FieldConfig& field) {
    bra.validate();
    ket.validate();
    LadderElement out;
    if (!same_momentum(bra, ket)) return out;
    int shift = 0;
    if (ket.n == bra.n + 1) {
        out.kind = LadderKind::lowering;
        shift = -1;
    } else if (ket.n + 1 == bra.n) {
        out.kind = LadderKind::raising;
        shift = 1;
    } else {
        return out;
    }

    const auto u = jl_spinor(bra, field);
    const auto v = jl_spinor(ket, field);
    const auto ul = u.levels();
    const auto vl = v.levels();
    double overlap = 0.0;
    for (int j = 0; j < 4; ++j) {
        const int from = vl[j];
        if (from < 0) continue;
        const int to = from + shift;
        if (to < 0 || to != ul[j]) continue;
        const double factor = shift < 0 ? std::sqrt(double(from)) : std::sqrt(double(from + 1));
        overlap += u.components[j] * factor * v.components[j];
    }
    const double eb = bra.epsilon * landau_energy(bra.n, bra.k_z, field);
    const double ek = ket.epsilon * landau_energy(ket.n, ket.k_z, field);
    using namespace std::complex_literals;
    const auto value = std::exp(1i * (eb - ek) * t) * overlap;
    // the upper state's branch decides which part the element belongs to
    const int upper_branch = out.kind == LadderKind::lowering ? ket.epsilon : bra.epsilon;
    (upper_branch > 0 ? out.first : out.second) = value;
    return out;
}

}  // namespace zitter
