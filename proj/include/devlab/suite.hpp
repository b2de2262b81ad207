#pragma once

// Acceptance catalog: twelve numbered end-to-end checks over the estimator
// stack, each with pinned surfaces, budgets, and tolerances. The CLI `suite`
// subcommand and the acceptance test binary share these runners, so a pass
// here is the same statement in both places.

#include <cstdint>
#include <string>
#include <vector>

#include "devlab/io.hpp"

namespace devlab::suite {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0;    // wall time of this runner
  uint64_t seed = 0;     // master seed the runner derived its streams from
  io::json detail;       // structured numbers behind the verdict
};

struct SuiteOptions {
  uint64_t seed = 42;
  int workers = 1;
};

// Runs one criterion (ids 1..12). Throws ConfigError on unknown ids.
CriterionResult run_criterion(int id, const SuiteOptions& opt);

// Runs the listed criteria (all twelve when `ids` is empty), in order.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt,
                                       const std::vector<int>& ids = {});

// Summary document: one record per criterion plus an overall verdict.
io::json suite_report(const std::vector<CriterionResult>& results,
                      const SuiteOptions& opt);

}  // namespace devlab::suite
