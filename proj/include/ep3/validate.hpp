#pragma once

// Invariant suite behind the `validate` command.

#include "ep3/parallel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ep3 {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      ///< measured quantity
  double tolerance = 0.0;  ///< bound it is compared against
  std::string detail;
};

/// Runs every invariant check. Stochastic checks draw from streams of `seed`.
std::vector<CheckResult> run_validation(std::uint64_t seed, Exec exec = Exec::serial);

/// One line per check, "PASS|FAIL name value tol detail", plus a summary.
/// Byte-identical for identical seeds.
std::string validation_report(const std::vector<CheckResult>& checks, std::uint64_t seed);

}  // namespace ep3
