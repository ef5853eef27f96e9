#include "zitter/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "zitter/errors.hpp"
#include "zitter/landau.hpp"
#include "zitter/parallel.hpp"
#include "zitter/special.hpp"

namespace zitter {

namespace {

using cplx = std::complex<double>;
using namespace std::complex_literals;

// Neumaier summation on both parts of a complex accumulator.
class ComplexSum {
public:
    void add(cplx v) noexcept {
        add_part(re_, cre_, v.real());
        add_part(im_, cim_, v.imag());
    }
    cplx value() const noexcept { return {re_ + cre_, im_ + cim_}; }

private:
    static void add_part(double& sum, double& comp, double v) noexcept {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

struct Line {
    int n;
    double frequency;
    cplx cos_part;
    cplx sin_part;
};

struct LineSet {
    std::vector<Line> cyclotron;
    std::vector<Line> zitter;
};

// Coefficients of the pair of levels (m, m+1), independent of k_z.
struct PairCoefficients {
    int m;
    cplx second;  // |a2|^2 sqrt(m+1) U_{m,m+1}
    cplx first;   // |a1|^2 sqrt(m) U_{m-1,m}
    cplx mixing;  // a2^* a1 U_{m,m}
};

std::vector<PairCoefficients> pair_coefficients(const GaussianPacket& packet,
                                                const CoefficientSet& coeffs) {
    const double w2 = std::norm(packet.a2), w1 = std::norm(packet.a1);
    const cplx wm = std::conj(packet.a2) * packet.a1;
    const int top = coeffs.n_max;
    std::vector<PairCoefficients> out;
    double largest = 0.0;
    for (int m = 0; m <= top; ++m) {
        PairCoefficients c{m, 0.0, 0.0, 0.0};
        if (m < top) c.second = w2 * std::sqrt(m + 1.0) * coeffs.U(m, m + 1);
        if (m >= 1) c.first = w1 * std::sqrt(double(m)) * coeffs.U(m - 1, m);
        c.mixing = wm * coeffs.U(m, m);
        largest = std::max({largest, std::abs(c.second), std::abs(c.first), std::abs(c.mixing)});
        out.push_back(c);
    }
    // drop pairs far below roundoff of the dominant terms
    std::erase_if(out, [&](const PairCoefficients& c) {
        return std::abs(c.second) + std::abs(c.first) + std::abs(c.mixing) < 1e-17 * largest;
    });
    return out;
}

struct NodeWeight {
    double k_z;
    double weight;  // includes |g_z|^2 dk_z
};

void append_pair(const PairCoefficients& c, const FieldConfig& field, NodeWeight node,
                 double scale, LineSet& lines) {
    const double w = field.omega();
    const double e = landau_energy(c.m, node.k_z, field);
    const double e1 = landau_energy(c.m + 1, node.k_z, field);
    const double gap = w * w / (e + e1);
    const double beta = 1.0 / e + 1.0 / e1;
    const double delta = gap / (e * e1);
    const double mu = node.k_z * w / (e * e1);
    const double s = 0.5 * scale * node.weight;

    const cplx pc = s * (c.second * (2.0 - gap / e1) + c.first * (2.0 + gap / e) + c.mixing * mu);
    const cplx rc = -1i * s * (c.second + c.first) * beta;
    const cplx pz = s * (c.second * (gap / e1) - c.first * (gap / e) - c.mixing * mu);
    const cplx rz = 1i * s * (c.second + c.first) * delta;
    lines.cyclotron.push_back({c.m, gap, pc, rc});
    lines.zitter.push_back({c.m, e + e1, pz, rz});
}

LineSet build_lines(const std::vector<PairCoefficients>& pairs, const FieldConfig& field,
                    std::span<const NodeWeight> nodes) {
    const double scale = std::sqrt(2.0) * field.magnetic_length();
    LineSet lines;
    lines.cyclotron.reserve(pairs.size() * nodes.size());
    lines.zitter.reserve(pairs.size() * nodes.size());
    for (const auto& c : pairs)
        for (const auto& node : nodes) append_pair(c, field, node, scale, lines);
    return lines;
}

struct Sample {
    cplx value;
    cplx rate;
};

Sample evaluate(std::span<const Line> lines, double t) {
    ComplexSum value, rate;
    for (const auto& l : lines) {
        const double c = std::cos(l.frequency * t);
        const double s = std::sin(l.frequency * t);
        value.add(l.cos_part * c + l.sin_part * s);
        rate.add(l.frequency * (l.sin_part * c - l.cos_part * s));
    }
    return {value.value(), rate.value()};
}

double channel_scale(std::span<const Line> lines) {
    double s = 0.0;
    for (const auto& l : lines) s += std::abs(l.cos_part) + std::abs(l.sin_part);
    return s;
}

cplx offset_sum(std::span<const Line> lines) {
    ComplexSum acc;
    for (const auto& l : lines) acc.add(l.cos_part);
    return acc.value();
}

void fill_samples(const LineSet& lines, std::span<const double> times,
                  std::span<const std::size_t> which, Trajectory& out) {
    parallel_for(which.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t j = which[i];
            const auto c = evaluate(lines.cyclotron, times[j]);
            const auto z = evaluate(lines.zitter, times[j]);
            out.cyclotron[j] = c.value;
            out.zitter[j] = z.value;
            const cplx rate = c.rate + z.rate;
            out.vy[j] = rate.real();
            out.vx[j] = rate.imag();
        }
    });
}

void finish(Trajectory& out, cplx offset, const GaussianPacket& packet, const FieldConfig& field) {
    const double L = field.magnetic_length();
    out.y_offset = -offset.real();
    out.appendix_offset = -packet.k0x * L * L;
    out.offset_residual = out.y_offset + out.appendix_offset;
    for (std::size_t j = 0; j < out.times.size(); ++j) {
        const cplx z = out.cyclotron[j] + out.zitter[j];
        out.y[j] = z.real() + out.y_offset;
        out.x[j] = z.imag();
    }
}

Trajectory prepare(Model model, std::span<const double> times) {
    Trajectory out;
    out.model = model;
    out.times.assign(times.begin(), times.end());
    const std::size_t n = times.size();
    out.x.resize(n);
    out.y.resize(n);
    out.vx.resize(n);
    out.vy.resize(n);
    out.cyclotron.resize(n);
    out.zitter.resize(n);
    return out;
}

void check_coefficients(const CoefficientSet& coeffs, const DynamicsOptions& options) {
    if (coeffs.tail_mass > options.tail_tolerance)
        throw ToleranceError("coefficient tail mass " + std::to_string(coeffs.tail_mass) +
                                 " above tolerance; increase n_max",
                             coeffs.tail_mass);
}

// k_z quadrature in u = d_z (k_z - k0z), weight exp(-u^2) / sqrt(pi).
constexpr double u_extent = 6.5;
constexpr double gauss_span_limit = 30.0;
constexpr int max_panels = 1 << 17;

std::vector<NodeWeight> hermite_nodes(const GaussianPacket& packet, int order) {
    const auto rule = gauss_hermite(order);
    std::vector<NodeWeight> nodes;
    for (std::size_t i = 0; i < rule.size(); ++i)
        nodes.push_back({packet.k0z + rule.nodes[i] / packet.d_z,
                         rule.weights[i] / std::sqrt(std::numbers::pi)});
    return nodes;
}

std::vector<NodeWeight> panel_nodes(const GaussianPacket& packet, int panels) {
    const auto rule = clenshaw_curtis(-u_extent, u_extent, panels);
    std::vector<NodeWeight> nodes;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double u = rule.nodes[i];
        nodes.push_back({packet.k0z + u / packet.d_z,
                         rule.weights[i] * std::exp(-u * u) / std::sqrt(std::numbers::pi)});
    }
    return nodes;
}

// Upper bound of the spread of the interband phase across the k_z domain
// per unit time.
double phase_rate(const GaussianPacket& packet, const FieldConfig& field, int top_level) {
    const double lo = packet.k0z - u_extent / packet.d_z;
    const double hi = packet.k0z + u_extent / packet.d_z;
    const double near = std::clamp(0.0, lo, hi);
    const double far = std::abs(lo) > std::abs(hi) ? lo : hi;
    auto zb = [&](double k) {
        return landau_energy(top_level, k, field) + landau_energy(top_level + 1, k, field);
    };
    return zb(far) - zb(near);
}

struct KzChoice {
    LineSet lines;
    double error;
};

double mismatch(const LineSet& a, const LineSet& b, double t) {
    const double sc = std::max(channel_scale(b.cyclotron), 1e-300);
    const double sz = std::max(channel_scale(b.zitter), 1e-300);
    const double ec = std::abs(evaluate(a.cyclotron, t).value - evaluate(b.cyclotron, t).value) / sc;
    const double ez = std::abs(evaluate(a.zitter, t).value - evaluate(b.zitter, t).value) / sz;
    return std::max(ec, ez);
}

std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Order doubling until two successive rules agree at the largest time of
// the bucket.
KzChoice choose_kz_rule(const GaussianPacket& packet, const FieldConfig& field,
                        const std::vector<PairCoefficients>& pairs, double t_max, double rate,
                        double top_frequency, const DynamicsOptions& options) {
    const double span = t_max * rate;
    // phases near top_frequency * t_max carry this much roundoff in any rule
    const double tolerance = std::max(
        options.kz_tolerance, 16.0 * std::numeric_limits<double>::epsilon() * top_frequency * t_max);
    double error = INFINITY;
    if (span <= gauss_span_limit) {
        int order = std::clamp(options.kz_order, 2, gauss_hermite_max_order / 2);
        auto coarse = build_lines(pairs, field, hermite_nodes(packet, order));
        while (2 * order <= gauss_hermite_max_order) {
            auto fine = build_lines(pairs, field, hermite_nodes(packet, 2 * order));
            error = mismatch(coarse, fine, t_max);
            if (error <= tolerance) return {std::move(coarse), error};
            coarse = std::move(fine);
            order *= 2;
        }
    }
    int panels = std::max(8, int(std::ceil(span / 2.0)));
    auto coarse = build_lines(pairs, field, panel_nodes(packet, panels));
    while (2 * panels <= max_panels) {
        auto fine = build_lines(pairs, field, panel_nodes(packet, 2 * panels));
        error = mismatch(coarse, fine, t_max);
        if (error <= tolerance) return {std::move(coarse), error};
        coarse = std::move(fine);
        panels *= 2;
    }
    throw ToleranceError("k_z quadrature did not converge at t = " + std::to_string(t_max) +
                             "; achieved relative error " + scientific(error),
                         error);
}

// Runs `apply(lines, indices)` on groups of times that share one validated
// k_z rule; the groups double in phase span.
template <class Apply>
double for_each_kz_bucket(const GaussianPacket& packet, const FieldConfig& field,
                          const std::vector<PairCoefficients>& pairs,
                          std::span<const double> times, const DynamicsOptions& options,
                          Apply&& apply) {
    int top = 0;
    for (const auto& p : pairs) top = std::max(top, p.m);
    const double rate = std::max(phase_rate(packet, field, top), 1e-300);
    const double edge = std::abs(packet.k0z) + u_extent / packet.d_z;
    const double top_frequency = 2.0 * landau_energy(top + 1, edge, field);

    std::vector<std::vector<std::size_t>> buckets;
    std::vector<double> bucket_t;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double span = std::abs(times[j]) * rate;
        const int b = span <= gauss_span_limit
                          ? 0
                          : 1 + int(std::ceil(std::log2(span / gauss_span_limit)));
        if (std::size_t(b) >= buckets.size()) {
            buckets.resize(std::size_t(b) + 1);
            bucket_t.resize(std::size_t(b) + 1, 0.0);
        }
        buckets[std::size_t(b)].push_back(j);
        bucket_t[std::size_t(b)] = std::max(bucket_t[std::size_t(b)], std::abs(times[j]));
    }
    double worst = 0.0;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (buckets[b].empty()) continue;
        auto choice = choose_kz_rule(packet, field, pairs, bucket_t[b], rate, top_frequency, options);
        worst = std::max(worst, choice.error);
        apply(choice.lines, std::span<const std::size_t>(buckets[b]));
    }
    return worst;
}

LineSet planar_lines(const GaussianPacket& packet, const CoefficientSet& coeffs,
                     const FieldConfig& field) {
    const NodeWeight node{0.0, 1.0};
    return build_lines(pair_coefficients(packet, coeffs), field, std::span(&node, 1));
}

}  // namespace

Trajectory trajectory_2p1(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options) {
    packet.validate();
    if (packet.model != Model::planar) throw ConfigError("trajectory_2p1 needs a 2+1 packet");
    check_coefficients(coeffs, options);
    const auto lines = planar_lines(packet, coeffs, field);
    auto out = prepare(Model::planar, times);
    std::vector<std::size_t> all(times.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    fill_samples(lines, times, all, out);
    finish(out, offset_sum(lines.cyclotron) + offset_sum(lines.zitter), packet, field);
    return out;
}

Trajectory trajectory_3p1(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options) {
    packet.validate();
    if (packet.model != Model::spatial) throw ConfigError("trajectory_3p1 needs a 3+1 packet");
    check_coefficients(coeffs, options);
    const auto pairs = pair_coefficients(packet, coeffs);
    auto out = prepare(Model::spatial, times);
    out.kz_error = for_each_kz_bucket(packet, field, pairs, times, options,
                                      [&](const LineSet& lines, std::span<const std::size_t> which) {
                                          fill_samples(lines, times, which, out);
                                      });
    // t = 0 needs no oscillatory resolution; the base rule gives the offset
    const double zero = 0.0;
    cplx offset;
    for_each_kz_bucket(packet, field, pairs, std::span(&zero, 1), options,
                       [&](const LineSet& lines, std::span<const std::size_t>) {
                           offset = offset_sum(lines.cyclotron) + offset_sum(lines.zitter);
                       });
    finish(out, offset, packet, field);
    return out;
}

Trajectory trajectory(const GaussianPacket& packet, const CoefficientSet& coeffs,
                      const FieldConfig& field, std::span<const double> times,
                      const DynamicsOptions& options) {
    return packet.model == Model::planar ? trajectory_2p1(packet, coeffs, field, times, options)
                                         : trajectory_3p1(packet, coeffs, field, times, options);
}

MixingSeries mixing_terms(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options) {
    packet.validate();
    MixingSeries out;
    out.times.assign(times.begin(), times.end());
    out.plus.assign(times.size(), 0.0);
    out.minus.assign(times.size(), 0.0);
    // proportional to p_z: identically zero in the 2+1 model
    if (packet.model == Model::planar) return out;

    // keep only the mixing amplitude of each pair
    auto pairs = pair_coefficients(packet, coeffs);
    for (auto& p : pairs) p.first = p.second = 0.0;
    for_each_kz_bucket(packet, field, pairs, times, options,
                       [&](const LineSet& lines, std::span<const std::size_t> which) {
                           // lines carry sqrt(2) L (1/2) a2^* a1 U_nn (+/-) mu
                           const double scale = std::sqrt(2.0) * field.magnetic_length();
                           parallel_for(which.size(), [&](std::size_t b, std::size_t e) {
                               for (std::size_t i = b; i < e; ++i) {
                                   const std::size_t j = which[i];
                                   out.plus[j] = evaluate(lines.cyclotron, times[j]).value / scale;
                                   out.minus[j] = evaluate(lines.zitter, times[j]).value / scale;
                               }
                           });
                       });
    return out;
}

VelocitySeries velocities(const GaussianPacket& packet, const CoefficientSet& coeffs,
                          const FieldConfig& field, std::span<const double> times,
                          const DynamicsOptions& options) {
    auto t = trajectory(packet, coeffs, field, times, options);
    return {std::move(t.vx), std::move(t.vy)};
}

double t_factor(int s1, int s2, int s3, int s4, double e_lower, double e_upper) {
    return s1 + s2 / e_lower + s3 / e_upper + s4 * e_lower / e_upper;
}

SubPacketSeries subpackets(const GaussianPacket& packet, const CoefficientSet& coeffs,
                           const FieldConfig& field, std::span<const double> times) {
    packet.validate();
    if (packet.model != Model::planar || std::abs(packet.a1) != 0.0)
        throw ConfigError("subpackets needs a 2+1 packet with only the second component");
    struct Term {
        cplx weight;  // sqrt(n+1) U_{n,n+1} / 4
        double gap, sum;
        double pp, pm_pm, pp_mm, pm_mp;  // T++_++, T+-_+-, T++_--, T+-_-+
    };
    std::vector<Term> terms;
    const double w = field.omega();
    for (int n = 0; n < coeffs.n_max; ++n) {
        const double e = landau_energy(n, 0.0, field);
        const double e1 = landau_energy(n + 1, 0.0, field);
        const double gap = w * w / (e + e1);
        const double em1 = double(n) * w * w / (e + 1.0);  // E_n - 1
        terms.push_back({0.25 * std::sqrt(n + 1.0) * coeffs.U(n, n + 1), gap, e + e1,
                         1.0 + 1.0 / e + 1.0 / e1 + e / e1, gap * em1 / (e * e1),
                         gap * (e + 1.0) / (e * e1), em1 * (1.0 / e + 1.0 / e1)});
    }
    SubPacketSeries out;
    out.times.assign(times.begin(), times.end());
    const std::size_t count = times.size();
    out.lower_positive.resize(count);
    out.lower_negative.resize(count);
    out.raise_positive.resize(count);
    out.raise_negative.resize(count);
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const double t = times[j];
            ComplexSum a1, a2, d1, d2;
            for (const auto& term : terms) {
                const cplx slow = std::exp(-1i * term.gap * t);
                const cplx fast = std::exp(-1i * term.sum * t);
                a1.add(term.weight * (term.pp * slow + term.pm_pm * fast));
                a2.add(term.weight * (term.pp_mm * std::conj(fast) + term.pm_mp * std::conj(slow)));
                const cplx wc = std::conj(term.weight);
                d1.add(wc * (term.pp * std::conj(slow) + term.pm_pm * std::conj(fast)));
                d2.add(wc * (term.pp_mm * fast + term.pm_mp * slow));
            }
            out.lower_positive[j] = a1.value();
            out.lower_negative[j] = a2.value();
            out.raise_positive[j] = d1.value();
            out.raise_negative[j] = d2.value();
        }
    });
    return out;
}

std::vector<SpectralLine> spectral_decomposition(const GaussianPacket& packet,
                                                 const CoefficientSet& coeffs,
                                                 const FieldConfig& field) {
    packet.validate();
    if (packet.model != Model::planar)
        throw ConfigError("spectral decomposition is defined for the 2+1 model");
    const auto lines = planar_lines(packet, coeffs, field);
    const double cutoff = 1e-12 * field.magnetic_length();
    std::vector<SpectralLine> out;
    auto convert = [&](const std::vector<Line>& src, LineKind kind) {
        for (const auto& l : src) {
            SpectralLine s;
            s.n = l.n;
            s.kind = kind;
            s.frequency = l.frequency;
            s.cos_part = l.cos_part;
            s.sin_part = l.sin_part;
            s.amplitude_y = std::hypot(l.cos_part.real(), l.sin_part.real());
            s.amplitude_x = std::hypot(l.cos_part.imag(), l.sin_part.imag());
            if (std::max(s.amplitude_x, s.amplitude_y) >= cutoff) out.push_back(s);
        }
    };
    convert(lines.cyclotron, LineKind::cyclotron);
    convert(lines.zitter, LineKind::zitter);
    return out;
}

double LowFieldSummary::envelope(double t) const {
    if (d_z <= 0.0) return 1.0;
    const double d4 = std::pow(d_z, 4);
    return std::pow(d4 / (d4 + t * t), 0.25);
}

LowFieldSummary lowfield_summary(const GaussianPacket& packet, const FieldConfig& field) {
    packet.validate();
    LowFieldSummary s;
    const double L = field.magnetic_length();
    s.cyclotron_radius = std::abs(packet.k0x) * L * L;
    s.omega_cyclotron = field.omega_cyclotron();
    s.zitter_amplitude = 0.5 * std::abs(packet.k0x);
    s.zitter_frequency = 2.0;
    s.d_z = packet.model == Model::spatial ? packet.d_z : 0.0;
    s.kappa = field.kappa();
    if (s.kappa >= 1e-2)
        s.warning = "low-field formulas assume kappa << 1; kappa = " + std::to_string(s.kappa);
    return s;
}

}  // namespace zitter
