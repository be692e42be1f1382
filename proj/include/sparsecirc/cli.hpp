#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsecirc {

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitUsage = 2 };

/// Subcommands: run <config>, figure <figure-spec>, verify, list.
/// Worker count comes from --workers, else SPARSECIRC_WORKERS, else 1.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-check suite behind `verify`: identities, invariants and codec round trips.
std::vector<CheckResult> run_verify_suite();

}  // namespace sparsecirc
