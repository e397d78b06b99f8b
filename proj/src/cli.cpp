#include "tsg/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "tsg/runner.hpp"
#include "tsg/scenario.hpp"

namespace tsg {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInputError = 2;

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::parse_error, "cannot read scenario file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return load_scenario(text.str());
}

/// Seed precedence: --seed flag, then TSG_SEED, then the scenario's own.
std::optional<std::uint64_t> env_seed() {
    const char* env = std::getenv("TSG_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    char* endp = nullptr;
    const unsigned long long v = std::strtoull(env, &endp, 10);
    if (endp == env || *endp != '\0') {
        throw Error(Errc::bad_parameter, std::string("TSG_SEED is not an integer: ") + env);
    }
    return static_cast<std::uint64_t>(v);
}

struct CliState {
    std::string scenario_path;
    RunOptions opts;
    std::string format = "csv";
    bool seed_given = false;
    std::uint64_t seed_value = 0;
    bool tol_given = false;
    double tol_value = 0.0;
};

void add_common_flags(CLI::App* cmd, CliState& st, bool with_seed) {
    cmd->add_option("scenario", st.scenario_path, "Scenario file (JSON)")->required();
    cmd->add_option("--format", st.format, "Report format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--tol", st.tol_value, "Dominance tolerance (relative)")
        ->each([&st](const std::string&) { st.tol_given = true; });
    if (with_seed) {
        cmd->add_option("--seed", st.seed_value, "Random seed")
            ->each([&st](const std::string&) { st.seed_given = true; });
    }
}

void finish_options(CliState& st) {
    st.opts.format = st.format == "jsonl" ? ReportFormat::jsonl : ReportFormat::csv;
    if (st.tol_given) {
        if (!(st.tol_value > 0.0)) {
            throw Error(Errc::bad_parameter, "--tol must be > 0");
        }
        st.opts.tol = st.tol_value;
    }
    if (st.seed_given) {
        st.opts.seed = st.seed_value;
    } else if (auto s = env_seed()) {
        st.opts.seed = *s;
    }
    if (st.opts.jobs < 1) {
        st.opts.jobs = 1;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite time-scale Gronwall bound verifier"};
    app.require_subcommand(1);

    CliState st;

    CLI::App* verify = app.add_subcommand(
        "verify", "Compute the bound, solve the oracle, and check dominance");
    add_common_flags(verify, st, /*with_seed=*/true);
    verify->add_flag("--allow-hypothesis-violation", st.opts.allow_hypothesis_violation,
                     "Compute even when bound hypotheses fail (verdict is downgraded)");
    verify->add_flag("--corrupt-bound", st.opts.corrupt_bound)->group("");  // test hook

    CLI::App* solve = app.add_subcommand("solve", "Emit the oracle solution grid");
    add_common_flags(solve, st, /*with_seed=*/false);
    solve->add_flag("--allow-hypothesis-violation", st.opts.allow_hypothesis_violation,
                    "Solve even when bound hypotheses fail");

    CLI::App* fuzz = app.add_subcommand("fuzz", "Run the randomized dominance suite");
    add_common_flags(fuzz, st, /*with_seed=*/true);
    fuzz->add_option("--jobs", st.opts.jobs, "Worker threads for fuzz instances");

    CLI::App* limit = app.add_subcommand("limit", "Refinement / continuum-convergence study");
    add_common_flags(limit, st, /*with_seed=*/false);
    limit->add_option("--refine", st.opts.refine, "Refinement ceiling factor")
        ->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        finish_options(st);
        const Scenario scenario = load_scenario_file(st.scenario_path);

        if (verify->parsed()) {
            const VerifyOutcome outcome = run_verify(scenario, st.opts);
            out << outcome.rendered;
            err << outcome.summary << '\n';
            for (const HypothesisIssue& issue : outcome.hypothesis_issues) {
                err << "hypothesis: " << errc_name(issue.code) << ": " << issue.detail << '\n';
            }
            return outcome.report.verdict == Verdict::dominated ? kExitOk : kExitViolation;
        }
        if (solve->parsed()) {
            const SolveOutcome outcome = run_solve(scenario, st.opts);
            out << outcome.rendered;
            err << outcome.summary << '\n';
            return kExitOk;
        }
        if (fuzz->parsed()) {
            const FuzzOutcome outcome = run_fuzz(scenario, st.opts);
            out << outcome.rendered;
            err << outcome.summary << '\n';
            return outcome.violation_count == 0 ? kExitOk : kExitViolation;
        }
        const LimitOutcome outcome = run_limit(scenario, st.opts);
        out << outcome.rendered;
        err << outcome.summary << '\n';
        for (const LimitRow& row : outcome.rows) {
            if (!row.dominated) {
                return kExitViolation;
            }
        }
        return kExitOk;
    } catch (const ScenarioValidationError& e) {
        err << "scenario validation failed: " << e.what() << '\n';
        return kExitInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace tsg
