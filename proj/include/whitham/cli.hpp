#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "whitham/error.hpp"
#include "whitham/polyring.hpp"
#include "whitham/spectral.hpp"

namespace whitham {

enum ExitCode : int {
  kExitPass = 0,
  kExitFailed = 1,     // conditions checked and not met
  kExitUsage = 2,      // bad arguments or unparsable input
  kExitNumerical = 3,  // a computation could not be completed
};

int exit_code(ErrorKind kind);

struct CliConfig {
  std::string command;  // validate, classify, tangent, flow, oracle, plot, seed
  std::string input;    // file or directory; optional for oracle and seed
  ToleranceProfile tol;
  double cluster_radius = kGcdClusterRadius;
  std::optional<std::string> format;  // json, csv or svg; default depends on command
  std::string out;                    // stdout when empty
  std::uint64_t seed = 1;
  int steps = 10;
  double dt = 1e-2;
  std::array<double, 2> params = {1.0, 0.0};
  // seed command
  int genus = 1;
  std::string shape = "generic";
  double lattice_scale = 3.0;
  int max_attempts = 40;
};

// Executes one command; reports go to `out` (or cfg.out), diagnostics to `err`.
int run(const CliConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and runs. Usage errors return kExitUsage.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace whitham
