#pragma once

#include <iosfwd>
#include <optional>

#include "zitter_cli/config.hpp"
#include "zitter_cli/document.hpp"

namespace zitter::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_tolerance = 3, exit_capacity = 4 };

// Each command builds a document; `status` is set to exit_tolerance when a
// check in the report failed but the document is still worth writing.
struct CommandOutput {
    Document document;
    int status = exit_ok;
    std::string summary;  // one-line human readable result
};

CommandOutput cmd_trajectory(const RunConfig& cfg);
CommandOutput cmd_spectrum(const RunConfig& cfg);
CommandOutput cmd_sumrules(const RunConfig& cfg);
CommandOutput cmd_oracle_check(const RunConfig& cfg);
CommandOutput cmd_lowfield(const RunConfig& cfg);

struct IonMapRequest {
    TrapParams trap;
    Model model = Model::spatial;
    std::optional<double> target_kappa;
    std::string description;
    std::string figure;
};

// Default trap: eta = 0.06, Omega~ = 2 pi x 68 kHz, Omega = 2 pi x 1 kHz,
// Delta = 96 Angstrom.
TrapParams default_trap();

CommandOutput cmd_ion_map(const IonMapRequest& request);

// Entry point of the zitter executable.
int run(int argc, char** argv);

}  // namespace zitter::cli
