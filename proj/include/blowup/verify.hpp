#pragma once

// Invariant suites behind `blowup verify`. Each check reports the measured
// quantity next to the tolerance it was held to.

#include <cstdint>
#include <string>
#include <vector>

namespace blowup {

struct CheckResult {
  std::string suite;
  std::string name;
  double measured = 0.0;
  /// Human-readable requirement, e.g. "<= 1e-08".
  std::string required;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
};

/// Known suites: anisotropy, circle, sphere, perturbation, pde, reduction.
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Throws InvalidArgument for an
/// unknown name. A check that throws is recorded as a failure.
std::vector<CheckResult> run_suite(const std::string& name, const VerifyOptions& options = {});

}  // namespace blowup
