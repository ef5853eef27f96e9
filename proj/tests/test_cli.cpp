#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zitter/errors.hpp"
#include "zitter_cli/commands.hpp"

using namespace zitter;
using namespace zitter::cli;
namespace fs = std::filesystem;

namespace {

const fs::path configs = ZITTER_CONFIG_DIR;

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("zitter_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_tool(const std::string& args, const fs::path& output = {}) {
    std::string cmd = std::string(ZITTER_EXE) + " " + args;
    cmd += output.empty() ? " > /dev/null" : " > " + output.string();
    cmd += " 2> " + (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const std::string& name, const nlohmann::json& doc) {
    const auto p = scratch() / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

nlohmann::json base_config() {
    return nlohmann::json::parse(R"({
      "model": "2+1",
      "units": "physical",
      "field": {"magnetic_length": 1.0},
      "packet": {"d_x": 1.5, "d_y": 1.2, "k0x": 0.998},
      "time": {"t_end": 20.0, "samples": 41}
    })");
}

std::string error_text() { return read_file(scratch() / "stderr.txt"); }

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(base_config());
    CHECK(cfg.model == Model::planar);
    CHECK(cfg.packet.a2 == std::complex<double>(1.0, 0.0));
    CHECK(cfg.time.values().size() == 41);

    auto doc = base_config();
    doc["packet"]["colour"] = "red";
    CHECK_THROWS_WITH_AS(parse_config(doc), "packet.colour: unknown key", ConfigError);

    doc = base_config();
    doc["field"]["tesla"] = 4.4e9;
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("exactly one of"), ConfigError);

    doc = base_config();
    doc["packet"]["a1"] = {0.0, 0.5};
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("|a1|^2 + |a2|^2 = 1"), ConfigError);

    doc = base_config();
    doc["packet"]["d_x"] = "wide";
    CHECK_THROWS_WITH_AS(parse_config(doc), "packet.d_x: expected a number", ConfigError);

    doc = base_config();
    doc["packet"]["d_z"] = 1.0;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = base_config();
    doc.erase("packet");
    CHECK_THROWS_WITH_AS(parse_config(doc), "packet: required key missing", ConfigError);

    doc = base_config();
    doc["units"] = "trap";
    doc.erase("field");
    doc["trap"] = {{"eta", 0.06}, {"omega_tilde_hz", 68000.0}, {"kappa", 16.65}, {"delta_angstrom", 96.0}};
    doc["packet"] = {{"length_unit", "magnetic_length"}, {"d_x", 0.9}, {"d_y", 1.0}, {"k0x", 1.4}};
    const auto trap = parse_config(doc);
    CHECK(trap.field.kappa() == doctest::Approx(16.65).epsilon(1e-12));
    CHECK(trap.packet.d_y == doctest::Approx(trap.field.magnetic_length()));
    doc["trap"]["eta"] = -1.0;
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("trap"), ConfigError);
}

TEST_CASE("every bundled config parses and names its figure and tolerance") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(configs)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const auto cfg = load_config(entry.path());
        CHECK(!cfg.figure.empty());
        CHECK(cfg.acceptance_tolerance.has_value());
        ++count;
    }
    CHECK(count >= 8);
}

TEST_CASE("csv and json round trips are lossless") {
    const auto cfg = parse_config(base_config());
    auto out = cmd_trajectory(cfg);
    for (auto format : {Format::csv, Format::json}) {
        std::stringstream s;
        write_document(out.document, format, s);
        const auto back = format == Format::csv ? read_csv(s) : read_json(s);
        CHECK(back.header == out.document.header);
        REQUIRE(back.tables.size() == out.document.tables.size());
        for (std::size_t t = 0; t < back.tables.size(); ++t) {
            const auto& a = out.document.tables[t];
            const auto& b = back.tables[t];
            CHECK(a.name == b.name);
            REQUIRE(a.columns.size() == b.columns.size());
            for (std::size_t c = 0; c < a.columns.size(); ++c) {
                CHECK(a.columns[c].name == b.columns[c].name);
                CHECK(a.columns[c].numbers == b.columns[c].numbers);
                CHECK(a.columns[c].labels == b.columns[c].labels);
            }
        }
    }
}

TEST_CASE("trajectory output") {
    const auto cfg = load_config(configs / "fig1_2p1.json");
    const auto out = cmd_trajectory(cfg);
    const auto& t = out.document.tables.front();
    CHECK(std::abs(t.column("x").numbers[0]) < 1e-10);
    CHECK(std::abs(t.column("y").numbers[0]) < 1e-10);
    CHECK(out.document.header["unit_length"] == "lambda_c");
    CHECK(out.document.header["unit_time"] == "t_c");
    CHECK(out.document.header.contains("sum_rule_normalization_residual"));
    CHECK(out.document.tables.size() == 2);
    CHECK(out.document.tables[1].name == "spectrum");
}

TEST_CASE("trap config oscillates without decay") {
    const auto cfg = load_config(configs / "fig6a_trap.json");
    const auto out = cmd_trajectory(cfg);
    const auto& y = out.document.tables.front().column("y").numbers;
    CHECK(out.document.header["unit_length"] == "L");
    const std::size_t half = y.size() / 2;
    auto spread = [&](std::size_t a, std::size_t b) {
        const auto [lo, hi] = std::minmax_element(y.begin() + a, y.begin() + b);
        return *hi - *lo;
    };
    CHECK(spread(half, y.size()) >= 0.5 * spread(0, half));
}

TEST_CASE("sum rules through the command") {
    for (const char* name : {"fig1_2p1.json", "fig6a_trap.json", "fig9b_2p1.json", "circle_kappa1e-3.json",
                             "fig10_subpackets.json", "fig5_lowfield.json"}) {
        CAPTURE(name);
        const auto out = cmd_sumrules(load_config(configs / name));
        CHECK(out.status == exit_ok);
        const auto& r = out.document.tables.front().column("residual").numbers;
        CHECK(r[0] < 1e-10);
        CHECK(r[1] < 1e-10);
    }
    auto doc = base_config();
    doc["packet"]["k0x"] = 0.0;
    const auto zero = cmd_sumrules(parse_config(doc));
    CHECK(std::abs(zero.document.tables.front().column("value").numbers[1]) < 1e-12);
}

TEST_CASE("exit codes") {
    CHECK(run_tool("sumrules --config " + (configs / "fig1_2p1.json").string()) == 0);
    CHECK(run_tool("sumrules --config " + (configs / "tiny_nmax.json").string()) == 3);
    CHECK(error_text().find("tail mass") != std::string::npos);

    auto doc = base_config();
    doc["packet"]["a1"] = 0.5;
    CHECK(run_tool("trajectory --config " + write_config("bad.json", doc).string()) == 2);
    CHECK(error_text().find("|a1|^2 + |a2|^2 = 1") != std::string::npos);

    CHECK(run_tool("trajectory --config " + (scratch() / "missing.json").string()) == 2);
    CHECK(run_tool("trajectory") == 2);
    CHECK(run_tool("frobnicate") == 2);
    CHECK(run_tool("trajectory --format xml --config " + (configs / "fig1_2p1.json").string()) == 2);
    CHECK(run_tool("--version") == 0);

    doc = base_config();
    doc["numerics"] = {{"n_max", 460}};
    CHECK(run_tool("sumrules --config " + write_config("big.json", doc).string()) == 4);
}

TEST_CASE("output is byte-identical across runs and thread counts") {
    const auto cfg = (configs / "fig1_3p1.json").string();
    const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
    REQUIRE(run_tool("trajectory --config " + cfg + " --threads 1", a) == 0);
    REQUIRE(run_tool("trajectory --config " + cfg + " --threads 3", b) == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a).rfind("# program: \"zitter\"", 0) == 0);
}

TEST_CASE("oracle-check command") {
    for (const char* name : {"fig1_2p1.json", "fig9b_2p1.json", "fig6a_trap.json"}) {
        CAPTURE(name);
        const auto out = cmd_oracle_check(load_config(configs / name));
        CHECK(out.status == exit_ok);
        CHECK(out.document.header["max_relative_deviation"].get<double>() < 1e-6);
    }
}

TEST_CASE("ion-map command") {
    IonMapRequest r;
    r.trap = default_trap();
    const auto doc = cmd_ion_map(r).document;
    CHECK(std::abs(doc.header["kappa"].get<double>() - 16.65) < 0.01);
    CHECK(doc.header["laser_pairs"] == 12);

    const auto out = scratch() / "ion.json";
    REQUIRE(run_tool("ion-map --model 2+1", out) == 0);
    const auto j = nlohmann::json::parse(read_file(out));
    CHECK(j["header"]["laser_pairs"] == 8);

    REQUIRE(run_tool("ion-map --target-kappa 1.0", out) == 0);
    const auto k = nlohmann::json::parse(read_file(out));
    CHECK(k["header"]["omega_carrier_rad_per_s"].get<double>() ==
          doctest::Approx(0.06 * angular_from_hertz(68e3)).epsilon(1e-15));
    CHECK(k["header"]["kappa"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    const auto bad = write_config("trap.json", {{"trap", {{"eta", 0.0}, {"omega_tilde_hz", 68000.0},
                                                          {"omega_carrier_hz", 1000.0}, {"delta_angstrom", 96.0}}}});
    CHECK(run_tool("ion-map --config " + bad.string()) == 2);
    CHECK(run_tool("ion-map --config " + (configs / "fig6a_trap.json").string(), out) == 0);
    CHECK(run_tool("ion-map --target-kappa -2") == 2);
}

TEST_CASE("lowfield command") {
    const auto out = cmd_lowfield(load_config(configs / "fig5_lowfield.json"));
    CHECK(out.document.header["zitter_amplitude_angstrom"].get<double>() == doctest::Approx(6.5e-8).epsilon(0.1));
    CHECK_FALSE(out.document.header.contains("validity_warning"));
    const auto warn = cmd_lowfield(load_config(configs / "fig1_2p1.json"));
    CHECK(warn.document.header.contains("validity_warning"));
}
