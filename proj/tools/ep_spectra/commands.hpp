#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "report_io.hpp"

namespace ep_cli {

struct CommandOutput {
  json payload;
  std::vector<CsvTable> tables;
};

struct RunContext {
  std::uint64_t seed = 0;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::function<CommandOutput(const RunContext&)> run;
};

/// Registers every subcommand on `app`. Option storage lives in the returned
/// closures, so the vector must outlive parsing and execution.
std::vector<Command> register_commands(CLI::App& app);

/// Parses "a:b:n" into n points from a to b inclusive; `geometric` spaces them in log.
std::vector<double> parse_grid(const std::string& spec, bool geometric = false);

}  // namespace ep_cli
