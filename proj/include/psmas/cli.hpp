#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psmas::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,    // bad flags or invalid input
  kRuntime = 3,  // I/O or other runtime failure
};

/// Entry point behind the `psmas` executable. `args` excludes the program name.
/// Outputs go under --out; a one-line summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string (input digests in run manifests).
std::string sha256_hex(const std::string& bytes);

}  // namespace psmas::cli
