#include "zitter_cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "zitter/errors.hpp"
#include "zitter/parallel.hpp"

#ifndef ZITTER_VERSION
#define ZITTER_VERSION "unknown"
#endif

namespace zitter::cli {

namespace {

using ojson = nlohmann::ordered_json;

ojson complex_json(std::complex<double> z) { return ojson::array({z.real(), z.imag()}); }

std::string format_short(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

ojson base_header(const RunConfig& cfg, const char* command) {
    ojson h;
    h["program"] = "zitter";
    h["version"] = ZITTER_VERSION;
    h["command"] = command;
    if (!cfg.description.empty()) h["description"] = cfg.description;
    if (!cfg.figure.empty()) h["figure"] = cfg.figure;
    if (!cfg.criterion.empty()) h["criterion"] = cfg.criterion;
    if (cfg.acceptance_tolerance) h["acceptance_tolerance"] = *cfg.acceptance_tolerance;
    h["model"] = std::string(to_string(cfg.model));
    h["units"] = cfg.unit_mode == UnitMode::physical_electron ? "physical" : "trap";
    h["unit_time"] = "t_c";
    h["unit_length"] = std::string(to_string(cfg.output.length_unit));
    h["unit_velocity"] = "c";
    h["kappa"] = cfg.field.kappa();
    h["magnetic_length"] = cfg.field.magnetic_length();
    h["omega"] = cfg.field.omega();
    h["omega_cyclotron"] = cfg.field.omega_cyclotron();
    if (auto b = cfg.field.field_strength()) h["field_tesla"] = *b;
    h["compton_length_m"] = cfg.units.compton_length();
    h["compton_time_s"] = cfg.units.compton_time();
    h["rest_energy_J"] = cfg.units.rest_energy();
    h["speed_m_per_s"] = cfg.units.speed();
    if (cfg.trap) {
        h["trap_eta"] = cfg.trap->eta;
        h["trap_omega_tilde_rad_s"] = cfg.trap->omega_tilde;
        h["trap_omega_carrier_rad_s"] = cfg.trap->omega_carrier;
        h["trap_delta_m"] = cfg.simulated->delta;
        h["trap_magnetic_length_m"] = cfg.simulated->magnetic_length_si;
    }
    const auto& p = cfg.packet;
    h["packet"] = {{"d_x", p.d_x}, {"d_y", p.d_y}, {"d_z", p.model == Model::spatial ? p.d_z : 0.0},
                   {"k0x", p.k0x}, {"k0z", p.k0z}, {"a1", complex_json(p.a1)},
                   {"a2", complex_json(p.a2)}};
    if (!cfg.warnings.empty()) h["warnings"] = cfg.warnings;
    return h;
}

double length_scale(const RunConfig& cfg) {
    return cfg.output.length_unit == LengthUnit::magnetic_length ? cfg.field.magnetic_length() : 1.0;
}

std::vector<double> scaled(std::vector<double> v, double by) {
    for (auto& x : v) x /= by;
    return v;
}

CoefficientSet coefficients(const RunConfig& cfg) {
    return coefficient_matrix(cfg.packet, cfg.field, cfg.numerics.coefficients);
}

void add_coefficient_report(ojson& h, const CoefficientSet& c, const SumRuleReport& r) {
    h["n_max"] = c.n_max;
    h["tail_mass"] = c.tail_mass;
    h["sum_rule_normalization_residual"] = r.normalization_residual;
    h["sum_rule_momentum_residual"] = r.momentum_residual;
    if (c.closed_form_deviation) h["closed_form_deviation"] = *c.closed_form_deviation;
}

void add_spectrum(Document& doc, const RunConfig& cfg, const CoefficientSet& c) {
    const auto lines = spectral_decomposition(cfg.packet, c, cfg.field);
    std::vector<double> n, f, ax, ay, fsi;
    std::vector<std::string> kind;
    const double s = length_scale(cfg);
    for (const auto& l : lines) {
        n.push_back(l.n);
        kind.emplace_back(l.kind == LineKind::cyclotron ? "cyclotron" : "zitter");
        f.push_back(l.frequency);
        ax.push_back(l.amplitude_x / s);
        ay.push_back(l.amplitude_y / s);
        fsi.push_back(cfg.units.frequency_to_si(l.frequency));
    }
    auto& t = doc.table("spectrum");
    t.add("n", n);
    t.add_labels("kind", kind);
    t.add("frequency", f);
    t.add("amplitude_x", ax);
    t.add("amplitude_y", ay);
    if (cfg.output.si_columns) t.add("frequency_rad_per_s", fsi);
}

struct Deviation {
    double absolute = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? absolute / scale : absolute; }
};

Deviation compare(std::span<const double> a, std::span<const double> o) {
    Deviation d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d.absolute = std::max(d.absolute, std::abs(a[i] - o[i]));
        d.scale = std::max(d.scale, std::abs(o[i]));
    }
    return d;
}

}  // namespace

TrapParams default_trap() {
    TrapParams t;
    t.eta = 0.06;
    t.omega_tilde = angular_from_hertz(68e3);
    t.omega_carrier = angular_from_hertz(1e3);
    t.delta = 96.0 * si::angstrom;
    return t;
}

CommandOutput cmd_trajectory(const RunConfig& cfg) {
    if (cfg.output.include_spectrum && cfg.model != Model::planar)
        throw ConfigError("output.include_spectrum: spectral lines are defined for the 2+1 model");
    const auto c = coefficients(cfg);
    const auto rules = sum_rules(c, cfg.packet, cfg.field);
    const auto times = cfg.time.values();
    const auto traj = trajectory(cfg.packet, c, cfg.field, times, cfg.numerics.dynamics);
    double vmax = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        vmax = std::max(vmax, std::hypot(traj.vx[i], traj.vy[i]));
    if (vmax > 1.0 + 1e-9)
        throw ToleranceError("velocity " + std::to_string(vmax) + " exceeds c", vmax - 1.0);

    CommandOutput out;
    auto& h = out.document.header = base_header(cfg, "trajectory");
    add_coefficient_report(h, c, rules);
    h["kz_error"] = traj.kz_error;
    h["y_offset"] = traj.y_offset;
    h["appendix_offset"] = traj.appendix_offset;
    h["offset_residual"] = traj.offset_residual;
    h["max_speed"] = vmax;

    const double s = length_scale(cfg);
    auto& t = out.document.table("trajectory");
    t.add("t", traj.times);
    t.add("x", scaled(traj.x, s));
    t.add("y", scaled(traj.y, s));
    if (cfg.output.include_velocities) {
        t.add("vx", traj.vx);
        t.add("vy", traj.vy);
    }
    if (cfg.output.si_columns) {
        std::vector<double> ts, xs, ys;
        for (std::size_t i = 0; i < times.size(); ++i) {
            ts.push_back(cfg.units.time_to_si(traj.times[i]));
            xs.push_back(cfg.units.length_to_si(traj.x[i]));
            ys.push_back(cfg.units.length_to_si(traj.y[i]));
        }
        t.add("t_s", ts);
        t.add("x_m", xs);
        t.add("y_m", ys);
    }
    if (cfg.output.include_spectrum) add_spectrum(out.document, cfg, c);
    out.summary = "trajectory: " + std::to_string(times.size()) + " samples, n_max " +
                  std::to_string(c.n_max) + ", tail mass " + format_short(c.tail_mass);
    return out;
}

CommandOutput cmd_spectrum(const RunConfig& cfg) {
    if (cfg.model != Model::planar)
        throw ConfigError("model: spectral lines are defined for the 2+1 model");
    const auto c = coefficients(cfg);
    CommandOutput out;
    auto& h = out.document.header = base_header(cfg, "spectrum");
    add_coefficient_report(h, c, sum_rules(c, cfg.packet, cfg.field));
    add_spectrum(out.document, cfg, c);
    out.summary = "spectrum: " + std::to_string(out.document.tables.back().columns[0].size()) +
                  " lines";
    return out;
}

CommandOutput cmd_sumrules(const RunConfig& cfg) {
    const auto c = coefficients(cfg);
    const auto r = sum_rules(c, cfg.packet, cfg.field);
    CommandOutput out;
    auto& h = out.document.header = base_header(cfg, "sumrules");
    add_coefficient_report(h, c, r);
    h["tolerance"] = cfg.numerics.sum_rule_tolerance;
    auto& t = out.document.table("sumrules");
    t.add_labels("rule", {"normalization", "momentum"});
    t.add("value", {r.normalization, r.momentum});
    t.add("expected", {1.0, r.momentum_expected});
    t.add("residual", {r.normalization_residual, r.momentum_residual});
    const double worst = std::max(r.normalization_residual, r.momentum_residual);
    const bool pass = worst < cfg.numerics.sum_rule_tolerance;
    h["pass"] = pass;
    out.status = pass ? exit_ok : exit_tolerance;
    out.summary = std::string("sumrules: ") + (pass ? "pass" : "FAIL") + ", residuals " +
                  format_short(r.normalization_residual) + " / " +
                  format_short(r.momentum_residual) + ", tail mass " + format_short(c.tail_mass);
    return out;
}

CommandOutput cmd_oracle_check(const RunConfig& cfg) {
    const auto c = coefficients(cfg);
    const auto times = cfg.time.values();
    const auto a = trajectory(cfg.packet, c, cfg.field, times, cfg.numerics.dynamics);
    const auto o = evolve_expectations(cfg.packet, cfg.field, times, cfg.numerics.oracle);

    CommandOutput out;
    auto& h = out.document.header = base_header(cfg, "oracle-check");
    add_coefficient_report(h, c, sum_rules(c, cfg.packet, cfg.field));
    h["oracle_truncation"] = o.truncation;
    h["oracle_leakage"] = o.leakage;
    h["oracle_norm_drift"] = o.norm_drift;
    h["oracle_energy_drift"] = o.energy_drift;
    h["oracle_density_trace_error"] = o.density_trace_error;
    h["oracle_kz_nodes"] = o.kz_nodes;
    h["analytic_y0"] = -a.y_offset;
    h["oracle_y0"] = o.y_initial;
    h["appendix_offset"] = a.appendix_offset;
    h["tolerance"] = cfg.numerics.oracle_tolerance;

    auto& t = out.document.table("comparison");
    t.add("t", a.times);
    std::vector<std::pair<std::string, Deviation>> channels;
    auto channel = [&](const std::string& name, const std::vector<double>& av,
                       const std::vector<double>& ov) {
        t.add(name + "_analytic", av);
        t.add(name + "_oracle", ov);
        channels.emplace_back(name, compare(av, ov));
    };
    channel("y", a.y, o.y);
    channel("x", a.x, o.x);
    channel("vx", a.vx, o.vx);
    channel("vy", a.vy, o.vy);

    const bool mixed = std::abs(cfg.packet.a1) > 0.0 && std::abs(cfg.packet.a2) > 0.0;
    if (cfg.model == Model::spatial && (mixed || cfg.packet.k0z != 0.0)) {
        std::vector<double> ma(times.size(), 0.0), mxa(times.size(), 0.0);
        std::vector<double> mo(times.size(), 0.0), mxo(times.size(), 0.0);
        if (mixed) {
            const auto mix = mixing_terms(cfg.packet, c, cfg.field, times, cfg.numerics.dynamics);
            const double s = std::sqrt(2.0) * cfg.field.magnetic_length();
            for (std::size_t i = 0; i < times.size(); ++i) {
                const auto z = s * (mix.plus[i] + mix.minus[i]);
                ma[i] = z.real();
                mxa[i] = z.imag();
            }
            // rho is linear in the spinor projectors: the cross part is the
            // full evolution minus the two single-component ones
            auto single = cfg.packet;
            single.a1 = 1.0;
            single.a2 = 0.0;
            const auto o1 = evolve_expectations(single, cfg.field, times, cfg.numerics.oracle);
            single.a1 = 0.0;
            single.a2 = 1.0;
            const auto o2 = evolve_expectations(single, cfg.field, times, cfg.numerics.oracle);
            const double w1 = std::norm(cfg.packet.a1), w2 = std::norm(cfg.packet.a2);
            for (std::size_t i = 0; i < times.size(); ++i) {
                mo[i] = o.y[i] - w1 * o1.y[i] - w2 * o2.y[i];
                mxo[i] = o.x[i] - w1 * o1.x[i] - w2 * o2.x[i];
            }
        }
        channel("mixing_y", ma, mo);
        channel("mixing_x", mxa, mxo);
    }

    // a channel that vanishes identically (mixing_y when a2^* a1 is imaginary) is
    // judged against the position scale instead of its own roundoff
    const double position_scale = std::max(channels[0].second.scale, channels[1].second.scale);
    double worst = 0.0;
    ojson report = ojson::object();
    for (auto& [name, d] : channels) {
        if (d.scale < 1e-12 * position_scale) d.scale = position_scale;
        report[name] = {{"max_abs_deviation", d.absolute}, {"scale", d.scale},
                        {"relative", d.relative()}};
        worst = std::max(worst, d.relative());
    }
    h["channels"] = report;
    h["max_relative_deviation"] = worst;
    const bool pass = worst < cfg.numerics.oracle_tolerance;
    h["pass"] = pass;
    out.status = pass ? exit_ok : exit_tolerance;
    out.summary = std::string("oracle-check: ") + (pass ? "pass" : "FAIL") +
                  ", max relative deviation " + format_short(worst) + " over " +
                  std::to_string(channels.size()) + " channels";
    return out;
}

CommandOutput cmd_lowfield(const RunConfig& cfg) {
    const auto s = lowfield_summary(cfg.packet, cfg.field);
    CommandOutput out;
    auto& h = out.document.header = base_header(cfg, "lowfield");
    h["cyclotron_radius"] = s.cyclotron_radius;
    h["cyclotron_radius_m"] = cfg.units.length_to_si(s.cyclotron_radius);
    h["omega_cyclotron"] = s.omega_cyclotron;
    h["omega_cyclotron_rad_per_s"] = cfg.units.frequency_to_si(s.omega_cyclotron);
    h["zitter_amplitude"] = s.zitter_amplitude;
    h["zitter_amplitude_angstrom"] = cfg.units.length_to_si(s.zitter_amplitude) / si::angstrom;
    h["zitter_frequency"] = s.zitter_frequency;
    h["zitter_frequency_rad_per_s"] = cfg.units.frequency_to_si(s.zitter_frequency);
    h["envelope_d_z"] = s.d_z;
    if (s.warning) h["validity_warning"] = *s.warning;
    const auto times = cfg.time.values();
    std::vector<double> env;
    for (double t : times) env.push_back(s.envelope(t));
    auto& t = out.document.table("envelope");
    t.add("t", times);
    t.add("envelope", env);
    out.summary = "lowfield: radius " + format_short(s.cyclotron_radius) + " lambda_c, ZB amplitude " +
                  format_short(h["zitter_amplitude_angstrom"].get<double>()) + " A" +
                  (s.warning ? " (warning: " + *s.warning + ")" : std::string());
    return out;
}

CommandOutput cmd_ion_map(const IonMapRequest& request) {
    TrapParams trap = request.trap;
    if (request.target_kappa)
        trap.omega_carrier = invert_kappa(*request.target_kappa, trap.eta, trap.omega_tilde);
    const auto sys = simulated_units(trap);
    const auto schedule = excitation_schedule(request.model);

    CommandOutput out;
    ojson h;
    h["program"] = "zitter";
    h["version"] = ZITTER_VERSION;
    h["command"] = "ion-map";
    if (!request.description.empty()) h["description"] = request.description;
    if (!request.figure.empty()) h["figure"] = request.figure;
    h["model"] = std::string(to_string(request.model));
    h["eta"] = trap.eta;
    h["omega_tilde_rad_per_s"] = trap.omega_tilde;
    h["omega_carrier_rad_per_s"] = trap.omega_carrier;
    h["omega_carrier_hz"] = trap.omega_carrier / two_pi;
    if (request.target_kappa) h["target_kappa"] = *request.target_kappa;
    h["kappa"] = kappa(trap);
    h["delta_m"] = sys.delta;
    h["isotropic"] = sys.isotropic;
    h["simulated_speed_m_per_s"] = sys.units.speed();
    h["simulated_rest_energy_J"] = sys.units.rest_energy();
    h["compton_length_m"] = sys.units.compton_length();
    h["compton_time_s"] = sys.units.compton_time();
    h["magnetic_length_m"] = sys.magnetic_length_si;
    h["magnetic_length_angstrom"] = sys.magnetic_length_si / si::angstrom;
    h["magnetic_length"] = sys.field.magnetic_length();
    h["omega_rad_per_s"] = sys.units.frequency_to_si(sys.field.omega());
    h["omega_cyclotron_rad_per_s"] = sys.units.frequency_to_si(sys.field.omega_cyclotron());
    h["representation"] = schedule.representation;
    h["laser_pairs"] = schedule.laser_pairs();
    if (!sys.warnings.empty()) h["warnings"] = sys.warnings;
    out.document.header = std::move(h);

    auto phase = [](const std::optional<double>& p) { return p ? *p : NAN; };
    std::vector<std::string> kind, term, axis, levels;
    std::vector<double> sign, red, blue, carrier, pairs;
    for (const auto& i : schedule.interactions) {
        kind.emplace_back(to_string(i.kind));
        term.push_back(i.term);
        axis.emplace_back(1, i.axis);
        levels.push_back(i.levels);
        sign.push_back(i.sign);
        red.push_back(phase(i.phase_red));
        blue.push_back(phase(i.phase_blue));
        carrier.push_back(phase(i.phase_carrier));
        pairs.push_back(i.laser_pairs);
    }
    auto& t = out.document.table("schedule");
    t.add_labels("kind", kind);
    t.add_labels("term", term);
    t.add_labels("axis", axis);
    t.add_labels("levels", levels);
    t.add("sign", sign);
    t.add("phase_red", red);
    t.add("phase_blue", blue);
    t.add("phase_carrier", carrier);
    t.add("laser_pairs", pairs);
    out.summary = "ion-map: kappa " + format_short(kappa(trap)) + ", " +
                  std::to_string(schedule.laser_pairs()) + " laser pairs";
    return out;
}

namespace {

IonMapRequest ion_map_request(const std::optional<std::string>& config_path, const std::string& model,
                              std::optional<double> target_kappa) {
    IonMapRequest request;
    request.trap = default_trap();
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw ConfigError("cannot open config " + *config_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(*config_path + ": " + e.what());
        }
        if (doc.contains("packet")) {
            const auto cfg = parse_config(doc);
            if (!cfg.trap) throw ConfigError("units: ion-map needs a trap config");
            request.trap = *cfg.trap;
            request.model = cfg.model;
            request.description = cfg.description;
            request.figure = cfg.figure;
        } else {
            for (const auto& item : doc.items())
                if (item.key() != "trap" && item.key() != "model" && item.key() != "description" &&
                    item.key() != "figure")
                    throw ConfigError(item.key() + ": unknown key");
            if (!doc.contains("trap")) throw ConfigError("trap: required key missing");
            request.trap = parse_trap(doc["trap"]);
            if (doc.contains("model")) request.model = model_from_string(doc["model"].get<std::string>());
            if (doc.contains("description")) request.description = doc["description"].get<std::string>();
            if (doc.contains("figure")) request.figure = doc["figure"].get<std::string>();
        }
    }
    if (!model.empty()) request.model = model_from_string(model);
    request.target_kappa = target_kappa;
    return request;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Wave-packet dynamics of a Dirac electron in a magnetic field"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ZITTER_VERSION);

    std::string config_path, output_path, format_text, model_text;
    int threads = 1;
    long seed = 0;
    std::optional<double> target_kappa;

    auto common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (config_required) opt->required();
        sub->add_option("--output", output_path, "output file; stdout when omitted");
        sub->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "reserved; every computation is deterministic");
    };
    auto* traj = app.add_subcommand("trajectory", "positions and velocities over the time grid");
    auto* spec = app.add_subcommand("spectrum", "cyclotron and interband lines of a 2+1 packet");
    auto* sums = app.add_subcommand("sumrules", "normalization and momentum sum rules of U");
    auto* orac = app.add_subcommand("oracle-check", "analytic series against dense evolution");
    auto* ion = app.add_subcommand("ion-map", "trap settings to simulated Dirac parameters");
    auto* low = app.add_subcommand("lowfield", "low-field cyclotron and interband estimates");
    for (auto* sub : {traj, spec, sums, orac, low}) common(sub, true);
    common(ion, false);
    ion->add_option("--model", model_text, "2+1 or 3+1")->check(CLI::IsMember({"2+1", "3+1"}));
    ion->add_option("--target-kappa", target_kappa, "solve Omega for this kappa");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        set_thread_count(threads);
        CommandOutput result;
        Format format = Format::csv;
        std::optional<std::filesystem::path> destination;
        if (ion->parsed()) {
            std::optional<std::string> path;
            if (!config_path.empty()) path = config_path;
            result = cmd_ion_map(ion_map_request(path, model_text, target_kappa));
            format = Format::json;
        } else {
            const auto cfg = load_config(config_path);
            format = cfg.output.format;
            destination = cfg.output.path;
            for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
            if (traj->parsed()) result = cmd_trajectory(cfg);
            if (spec->parsed()) result = cmd_spectrum(cfg);
            if (sums->parsed()) result = cmd_sumrules(cfg);
            if (orac->parsed()) result = cmd_oracle_check(cfg);
            if (low->parsed()) result = cmd_lowfield(cfg);
        }
        if (!format_text.empty()) format = format_from_string(format_text);
        if (!output_path.empty()) destination = output_path;
        if (destination) {
            std::ofstream file(*destination);
            if (!file) throw ConfigError("cannot write " + destination->string());
            write_document(result.document, format, file);
        } else {
            write_document(result.document, format, std::cout);
        }
        std::cerr << result.summary << '\n';
        return result.status;
    } catch (const ToleranceError& e) {
        std::cerr << "tolerance failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
        return exit_tolerance;
    } catch (const CapacityError& e) {
        std::cerr << "capacity exceeded: " << e.what() << '\n';
        return exit_capacity;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return exit_config;
    }
}

}  // namespace zitter::cli
