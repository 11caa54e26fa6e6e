#pragma once

// Whole-document analysis, learner runs and family sweeps; the library side
// of the riskbound command-line tool.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "riskbound/families.hpp"
#include "riskbound/learners.hpp"

namespace riskbound {

struct AnalysisOutcome {
  Json report;
  bool chain_valid = true;
  std::string failure;  ///< first failed chain flag, e.g. "irreducible: false"
};

/// Validation, lambda and V, the projected system, every bound and
/// condition check, and the zero-error certificate when it applies.
/// A = explicit "A" or C o P; B = explicit "B" or Q. An invalid chain stops
/// the analysis after validation.
AnalysisOutcome analyze(const ProblemDocument& doc);

enum class Algorithm { kAverageCost, kLspe, kTd };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct SimulationRequest {
  Algorithm algorithm = Algorithm::kAverageCost;
  std::size_t horizon = 100'000;
  std::uint64_t seed = 0;
  LearnerOptions options;
};

struct SimulationResult {
  LearnerTrace trace;
  Json summary;  ///< target, final_estimate, rel_error, diverged, ...
};

/// The average-cost run tracks the expected one-step cost
/// r(i) = sum_j p(j|i) c(i,j). lspe and td need "Phi" (SchemaError).
/// The reference state is the document's i0 unless options.i0 is set.
SimulationResult simulate(const ProblemDocument& doc, const SimulationRequest& request);

/// Rows n,estimate,target,abs_error for every thin-th step and the last one.
std::string trace_csv(const LearnerTrace& trace, std::size_t thin);

struct SweepGrid {
  FamilyKind kind = FamilyKind::kConstant;
  std::vector<std::size_t> sizes;
  std::vector<double> p{0.0};
  std::vector<double> q{0.0};
  std::vector<double> q_prime{0.0};
  std::vector<double> eps{0.0};
};

struct SweepRow {
  ExampleFamily family;
  BoundReport report;
};

/// Every grid point, sorted by (s, p, q, q', eps). Rows are computed on up
/// to `workers` threads; the result does not depend on the count.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, std::size_t workers);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// RISKBOUND_WORKERS when set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t default_workers();

}  // namespace riskbound
