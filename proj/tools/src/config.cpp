#include "zitter_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "zitter/errors.hpp"

namespace zitter::cli {

namespace {

using nlohmann::json;

// Strict view of one JSON object: every key must be consumed.
class Block {
public:
    Block(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) fail("expected an object");
    }

    bool has(const std::string& key) const { return value_.contains(key); }

    double number(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_number()) fail_key(key, "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }
    std::optional<double> maybe_number(const std::string& key) {
        return has(key) ? std::optional(number(key)) : std::nullopt;
    }
    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number_integer()) fail_key(key, "expected an integer");
        return v.get<int>();
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) fail_key(key, "expected true or false");
        return v.get<bool>();
    }
    std::string text(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string()) fail_key(key, "expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, std::string fallback) {
        return has(key) ? text(key) : std::move(fallback);
    }
    std::complex<double> amplitude(const std::string& key, std::complex<double> fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (v.is_number()) return v.get<double>();
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        fail_key(key, "expected a number or [re, im]");
    }
    std::vector<double> numbers(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_array()) fail_key(key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail_key(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    Block child(const std::string& key) { return Block(at(key), join(key)); }

    // rejects keys nobody asked for
    void finish() const {
        for (const auto& item : value_.items())
            if (!used_.contains(item.key()))
                throw ConfigError(join(item.key()) + ": unknown key");
    }

    [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
        throw ConfigError(join(key) + ": " + message);
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + message);
    }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& path() const noexcept { return path_; }

private:
    const json& at(const std::string& key) {
        if (!has(key)) fail_key(key, "required key missing");
        used_.insert(key);
        return value_.at(key);
    }

    const json& value_;
    std::string path_;
    std::set<std::string> used_;
};

// Re-throws a module's validation error with the block path in front.
template <class F>
auto within(const std::string& path, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

TrapParams read_trap(Block& b) {
    TrapParams trap;
    trap.eta = b.number("eta");
    trap.omega_tilde = angular_from_hertz(b.number("omega_tilde_hz"));
    const bool by_kappa = b.has("kappa");
    if (by_kappa == b.has("omega_carrier_hz"))
        b.fail("give exactly one of omega_carrier_hz and kappa");
    if (by_kappa) {
        const double k = b.number("kappa");
        trap.omega_carrier =
            within(b.join("kappa"), [&] { return invert_kappa(k, trap.eta, trap.omega_tilde); });
    } else {
        trap.omega_carrier = angular_from_hertz(b.number("omega_carrier_hz"));
    }
    if (auto d = b.maybe_number("delta_angstrom")) trap.delta = *d * si::angstrom;
    if (auto m = b.maybe_number("ion_mass_amu")) trap.ion_mass = *m * si::atomic_mass_unit;
    if (b.has("trap_freqs_hz")) {
        const auto nu = b.numbers("trap_freqs_hz");
        if (nu.size() != 3) b.fail_key("trap_freqs_hz", "expected three frequencies");
        trap.trap_freqs = std::array<double, 3>{angular_from_hertz(nu[0]), angular_from_hertz(nu[1]),
                                                angular_from_hertz(nu[2])};
    }
    b.finish();
    within(b.path(), [&] {
        trap.validate();
        return 0;
    });
    return trap;
}

LengthUnit length_unit_from(Block& b, const std::string& key) {
    const auto unit = b.text(key, "compton");
    if (unit == "compton") return LengthUnit::compton;
    if (unit == "magnetic_length") return LengthUnit::magnetic_length;
    b.fail_key(key, "expected \"compton\" or \"magnetic_length\"");
}

}  // namespace

Format format_from_string(std::string_view text) {
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw ConfigError("format must be csv or json, got \"" + std::string(text) + "\"");
}

std::string_view to_string(Format format) noexcept {
    return format == Format::csv ? "csv" : "json";
}

std::string_view to_string(LengthUnit unit) noexcept {
    return unit == LengthUnit::compton ? "lambda_c" : "L";
}

std::vector<double> TimeGrid::values() const {
    std::vector<double> out(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        out[std::size_t(i)] =
            samples == 1 ? start : start + (end - start) * double(i) / double(samples - 1);
    return out;
}

TrapParams parse_trap(const json& block) {
    Block b(block, "trap");
    return read_trap(b);
}

RunConfig parse_config(const json& document) {
    Block root(document, "");
    RunConfig cfg;
    cfg.description = root.text("description", "");
    cfg.figure = root.text("figure", "");
    if (root.has("acceptance")) {
        auto a = root.child("acceptance");
        cfg.criterion = a.text("criterion", "");
        cfg.acceptance_tolerance = a.maybe_number("tolerance");
        a.finish();
    }
    cfg.model = within("model", [&] { return model_from_string(root.text("model")); });

    const auto units = root.text("units", "physical");
    if (units == "physical") {
        cfg.unit_mode = UnitMode::physical_electron;
        if (root.has("trap")) root.fail_key("trap", "only valid with \"units\": \"trap\"");
        auto f = root.child("field");
        const int given = int(f.has("magnetic_length")) + int(f.has("tesla")) + int(f.has("kappa"));
        if (given != 1) f.fail("give exactly one of magnetic_length, tesla, kappa");
        cfg.field = within("field", [&] {
            if (f.has("tesla")) return FieldConfig::from_tesla(f.number("tesla"));
            if (f.has("kappa")) return FieldConfig::from_kappa(f.number("kappa"));
            return FieldConfig::from_magnetic_length(f.number("magnetic_length"));
        });
        f.finish();
        cfg.units = UnitSystem::physical_electron();
    } else if (units == "trap") {
        cfg.unit_mode = UnitMode::simulated;
        if (root.has("field")) root.fail_key("field", "not valid with \"units\": \"trap\"");
        auto t = root.child("trap");
        cfg.trap = read_trap(t);
        cfg.simulated = simulated_units(*cfg.trap);
        cfg.units = cfg.simulated->units;
        cfg.field = cfg.simulated->field;
        cfg.warnings = cfg.simulated->warnings;
    } else {
        root.fail_key("units", "expected \"physical\" or \"trap\"");
    }

    {
        auto p = root.child("packet");
        const double scale =
            length_unit_from(p, "length_unit") == LengthUnit::magnetic_length
                ? cfg.field.magnetic_length()
                : 1.0;
        cfg.packet.model = cfg.model;
        cfg.packet.bounded_momentum = cfg.unit_mode == UnitMode::physical_electron;
        cfg.packet.d_x = p.number("d_x") * scale;
        cfg.packet.d_y = p.number("d_y") * scale;
        if (cfg.model == Model::spatial)
            cfg.packet.d_z = p.number("d_z") * scale;
        else if (p.has("d_z"))
            p.fail_key("d_z", "not used by a 2+1 packet");
        cfg.packet.k0x = p.number("k0x", 0.0) / scale;
        cfg.packet.k0z = p.number("k0z", 0.0) / scale;
        cfg.packet.a1 = p.amplitude("a1", 0.0);
        cfg.packet.a2 = p.amplitude("a2", 1.0);
        p.finish();
        within("packet", [&] {
            cfg.packet.validate();
            return 0;
        });
    }

    if (root.has("numerics")) {
        auto n = root.child("numerics");
        auto& c = cfg.numerics.coefficients;
        c.n_max = n.integer("n_max", c.n_max);
        c.kx_order = n.integer("kx_order", c.kx_order);
        c.tail_tolerance = n.number("tail_tolerance", c.tail_tolerance);
        c.truncation_tail = n.number("truncation_tail", c.truncation_tail);
        auto& d = cfg.numerics.dynamics;
        d.kz_order = n.integer("kz_order", d.kz_order);
        d.kz_tolerance = n.number("kz_tolerance", d.kz_tolerance);
        d.tail_tolerance = c.tail_tolerance;
        auto& o = cfg.numerics.oracle;
        o.guard = n.integer("oracle_guard", o.guard);
        o.truncation = n.integer("oracle_truncation", o.truncation);
        o.kx_panels = n.integer("oracle_kx_panels", o.kx_panels);
        o.kz_panels = n.integer("oracle_kz_panels", o.kz_panels);
        cfg.numerics.sum_rule_tolerance = n.number("sum_rule_tolerance", cfg.numerics.sum_rule_tolerance);
        cfg.numerics.oracle_tolerance = n.number("oracle_tolerance", cfg.numerics.oracle_tolerance);
        n.finish();
        if (c.n_max < 0) n.fail_key("n_max", "must be non-negative");
        if (o.kx_panels < 1) n.fail_key("oracle_kx_panels", "must be positive");
        if (!(c.tail_tolerance > 0.0)) n.fail_key("tail_tolerance", "must be positive");
        if (!(d.kz_tolerance > 0.0)) n.fail_key("kz_tolerance", "must be positive");
    }

    if (root.has("time")) {
        auto t = root.child("time");
        cfg.time.start = t.number("t_start", 0.0);
        cfg.time.end = t.number("t_end");
        cfg.time.samples = t.integer("samples", 401);
        t.finish();
        if (cfg.time.samples < 1) t.fail_key("samples", "must be at least 1");
        if (!std::isfinite(cfg.time.start) || !std::isfinite(cfg.time.end))
            t.fail("times must be finite");
    }

    if (root.has("output")) {
        auto o = root.child("output");
        if (o.has("path")) cfg.output.path = o.text("path");
        cfg.output.format = within("output.format", [&] { return format_from_string(o.text("format", "csv")); });
        cfg.output.include_velocities = o.boolean("include_velocities", true);
        cfg.output.include_spectrum = o.boolean("include_spectrum", false);
        cfg.output.si_columns = o.boolean("si_columns", false);
        cfg.output.length_unit = length_unit_from(o, "length_unit");
        o.finish();
    }
    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(document);
}

}  // namespace zitter::cli
