#pragma once

// Pipelines behind the CLI subcommands. Each command turns a resolved
// configuration into named CSV/text files; writing them is a separate step so
// the outputs can be compared byte for byte.

#include "ep3/config.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ep3 {

struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  ///< (name, contents)
  std::string summary;                                     ///< printed to stdout
  bool ok = true;                                          ///< false when a check failed
};

/// spectrum, spectroscopy, winding, tomography, quench, liouvillian, validate
const std::vector<std::string>& command_names();

/// One-line description per command for the usage text.
std::string command_help(const std::string& command);

/// Throws std::invalid_argument for unknown commands and ConfigError for
/// invalid configurations.
CommandOutput run_command(const std::string& command, const ParamConfig& cfg);

/// Writes every file into `dir` plus `<command>.manifest`; returns the
/// manifest path.
std::filesystem::path write_outputs(const std::filesystem::path& dir, const std::string& command,
                                    const ParamConfig& cfg, const CommandOutput& out);

}  // namespace ep3
