#pragma once

#include <map>
#include <string>

#include "run_config.hpp"

namespace poincare::cli {

struct CliFlags {
  int jobs = 0;  ///< 0 keeps the OpenMP default
  std::string mesh_out;
  bool dump_matrices = false;
};

/// Everything a command produces; nothing touches the disk until
/// write_outputs, so a failed run leaves no partial files.
struct CommandResult {
  std::map<std::string, std::string> files;  ///< name in the output dir -> content
  std::string mesh_json;                     ///< for --mesh-out
  std::string summary;                       ///< printed to stdout
  int exit_code = 0;
};

CommandResult run_command(const RunConfig& config, const CliFlags& flags);

/// Writes each file through a temporary name and a rename.
void write_outputs(const RunConfig& config, const CliFlags& flags, const CommandResult& result);

/// Validates --mesh-out before any compute.
void check_flags(const CliFlags& flags);

}  // namespace poincare::cli
