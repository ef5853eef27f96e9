#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "zitter/dynamics.hpp"
#include "zitter/ion_map.hpp"
#include "zitter/oracle.hpp"
#include "zitter/packet.hpp"
#include "zitter/units.hpp"

namespace zitter::cli {

enum class Format { csv, json };
enum class LengthUnit { compton, magnetic_length };

Format format_from_string(std::string_view text);
std::string_view to_string(Format format) noexcept;
std::string_view to_string(LengthUnit unit) noexcept;

struct TimeGrid {
    double start = 0.0;  // Compton times
    double end = 200.0;
    int samples = 401;

    std::vector<double> values() const;
};

struct OutputOptions {
    std::optional<std::filesystem::path> path;
    Format format = Format::csv;
    bool include_velocities = true;
    bool include_spectrum = false;
    bool si_columns = false;
    LengthUnit length_unit = LengthUnit::compton;
};

struct Numerics {
    CoefficientOptions coefficients;
    DynamicsOptions dynamics;
    OracleOptions oracle;
    double sum_rule_tolerance = 1e-10;
    double oracle_tolerance = 1e-6;
};

// A fully resolved run: the field and unit system are derived from either
// the physical-field block or the trap block.
struct RunConfig {
    std::string description;
    std::string figure;
    std::string criterion;
    std::optional<double> acceptance_tolerance;

    Model model = Model::planar;
    UnitMode unit_mode = UnitMode::physical_electron;
    std::optional<TrapParams> trap;
    std::optional<SimulatedSystem> simulated;
    UnitSystem units = UnitSystem::physical_electron();
    FieldConfig field = FieldConfig::from_magnetic_length(1.0);
    GaussianPacket packet;
    Numerics numerics;
    TimeGrid time;
    OutputOptions output;
    std::vector<std::string> warnings;
};

// Throws ConfigError naming the offending key for unknown keys, wrong
// types and values rejected by the owning module.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);

// Trap block on its own, as accepted by the ion-map command.
TrapParams parse_trap(const nlohmann::json& block);

}  // namespace zitter::cli
