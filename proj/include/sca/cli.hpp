#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sca/core.hpp"

namespace sca::cli {

enum class Status { True, False, Error, ResourceExhausted };
std::string to_string(Status s);
// 0 true, 1 false, 2 error, 3 resource exhaustion.
int exit_code(Status s);

struct CommandResult {
  std::string command;
  Status status = Status::Error;
  nlohmann::json payload = nlohmann::json::object();
  double timing_ms = 0;
  std::string summary;

  nlohmann::json to_json() const;
};

// Parses and runs one command line (args[0] is the program name). Usage
// errors come back as Status::Error with the help text in `summary`.
CommandResult run(const std::vector<std::string>& args);

// run() plus output: the result document on `out`, a one-line summary (or
// help) on `err`. Returns the exit code.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

enum class DiagramStyle { Text, Pgm };
DiagramStyle parse_diagram_style(const std::string& text);

// Text: one row per time step, cells 0..w-1 formatted with the state tokens,
// w the longest period. Pgm: binary P5 of the same cells, 255 levels, state
// i drawn at level floor(255 i / (|Q| - 1)) (0 when |Q| = 1).
std::string render_diagram(const Alphabet& states, const SpaceTime& d, DiagramStyle style);

}  // namespace sca::cli
