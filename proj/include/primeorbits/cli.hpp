#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace primeorbits {

inline constexpr const char* kVersion = "0.1.0";

/// Result of one CLI invocation. Files are only written to disk when
/// `write` is set and the run succeeded.
struct CliResult {
  int exit_code = 0;
  std::map<std::string, std::string> files;  // name -> content, relative to the output dir
  std::map<std::string, std::string> digests;  // name -> sha256 hex
};

/// Runs one command line (without the program name).
CliResult run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool write = true);

std::string sha256_hex(const std::string& data);

}  // namespace primeorbits
