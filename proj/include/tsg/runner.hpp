#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsg/bounds.hpp"
#include "tsg/instance_gen.hpp"
#include "tsg/oracle.hpp"
#include "tsg/scenario.hpp"

namespace tsg {

enum class ReportFormat { csv, jsonl };

/// Options shared by the scenario drivers (CLI flags map onto these).
struct RunOptions {
    std::optional<double> tol;          // overrides the scenario tolerance
    std::optional<std::uint64_t> seed;  // overrides the scenario fuzz seed
    ReportFormat format = ReportFormat::csv;
    bool allow_hypothesis_violation = false;
    std::size_t jobs = 1;
    std::size_t refine = 1;     // ceiling factor for the limit study
    bool corrupt_bound = false; // test hook: injects one bound violation
};

/// Deterministic float text with 17 significant digits (lossless round trip).
std::string format_double(double v);

// ---------------------------------------------------------------------------
// verify: bound vs exact oracle solution on the scenario instance
// ---------------------------------------------------------------------------

struct VerifyOutcome {
    BoundReport report;
    Verdict effective_verdict = Verdict::dominated;  // downgraded if hypotheses unchecked
    std::vector<HypothesisIssue> hypothesis_issues;
    std::string rendered;  // per-node report, csv or jsonl
    std::string summary;   // single human-readable line
};

VerifyOutcome run_verify(const Scenario& scenario, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// solve: emit the oracle solution grid
// ---------------------------------------------------------------------------

struct SolveOutcome {
    std::string rendered;
    std::string summary;
};

SolveOutcome run_solve(const Scenario& scenario, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// fuzz: randomized dominance suite
// ---------------------------------------------------------------------------

struct FuzzInstance {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::size_t n1 = 0, n2 = 0, n3 = 0;  // n3 = 0 for two-variable instances
    Verdict verdict = Verdict::dominated;
    double min_margin = 0.0;
    double max_violation = 0.0;
    std::string error;  // nonempty when the instance failed to run; counts
                        // against the suite like a violation
};

struct FuzzOutcome {
    std::vector<FuzzInstance> instances;
    std::size_t violation_count = 0;
    std::uint64_t master_seed = 0;
    std::string rendered;
    std::string summary;
};

/// Run `params.count` random instances of the theorem's dominance check.
/// Every instance derives its own recorded seed from the master seed, so a
/// single instance can be replayed; results are assembled in index order no
/// matter how many jobs execute them.
FuzzOutcome run_fuzz_suite(TheoremId theorem, const FuzzParams& params, double tol,
                           std::size_t jobs = 1, ReportFormat format = ReportFormat::csv);

FuzzOutcome run_fuzz(const Scenario& scenario, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// limit: refinement / continuum-consistency study
// ---------------------------------------------------------------------------

struct LimitRow {
    std::size_t factor = 1;
    std::size_t n1 = 0, n2 = 0, n3 = 0;
    double subject_corner = 0.0;  // at the (max t1, max t2) corner
    double bound_corner = 0.0;
    double margin_corner = 0.0;
    double min_margin = 0.0;  // over the whole grid at this level
    bool dominated = true;
};

/// Re-run the scenario with every scale refined by factors 1, 2, 4, ... up
/// to opts.refine (the ceiling itself is always included). Functions must be
/// expression-defined: tables cannot be interpolated onto refined grids.
struct LimitOutcome {
    std::vector<LimitRow> rows;
    std::string rendered;
    std::string summary;
};

LimitOutcome run_limit(const Scenario& scenario, const RunOptions& opts = {});

} // namespace tsg
