#pragma once

// The iterative loop: bootstrap, initialize, then per iteration generate
// LTV and STV scenarios, execute them, deduplicate reports and update the
// graph. Everything is driven by action counts, never wall time.

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ffg/executor.hpp"
#include "ffg/updater.hpp"

namespace ffg {

struct RunConfig {
    std::filesystem::path app;
    std::uint64_t seed = 1;
    std::size_t max_actions = 500;
    std::size_t max_iterations = 6;
    std::set<std::string> disabled;  // ltv-func | ltv-flow | stv-single | stv-cross
    double sim_threshold = 0.7;
    double sep_threshold = 0.5;
    std::filesystem::path out_dir;  // empty: no artifacts
    std::string oracle = "spec";
    int jobs = 1;
    std::size_t per_strategy = 8;
    ExecutorConfig exec;
};

inline constexpr const char* kPhases[] = {"ltv-func", "ltv-flow", "stv-single", "stv-cross"};

struct MetricsRow {
    std::size_t iter = 0;
    std::size_t flows = 0;
    std::size_t functionalities = 0;
    std::size_t scenarios = 0;        // cumulative
    std::size_t bugs_crash = 0;       // cumulative, unique
    std::size_t bugs_functional = 0;  // cumulative, unique
    std::size_t actions = 0;          // cumulative, bootstrap included
    std::uint64_t millis = 0;         // simulated clock
};

inline constexpr std::uint64_t kMillisPerAction = 100;

std::string metrics_csv(const std::vector<MetricsRow>& rows);
void emit_metrics(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

/// Systematic walk: unvisited enabled widgets first, seeded tie-break, back
/// when a page is exhausted. Stops at `budget` actions or on a crash.
ExecutionTrace bootstrap_explore(SimulatorSession& session, std::size_t budget, std::uint64_t seed);

/// Replays a scripted bootstrap.
ExecutionTrace bootstrap_scripted(SimulatorSession& session, const std::vector<ActionStep>& steps);

struct IterationLog {
    std::vector<TestScenario> scenarios;
    std::vector<ScenarioResult> results;  // accepted, in scenario order
    IterationSummary updates;
    std::string ffg_snapshot;  // serialized graph after the update pass
};

struct RunResult {
    FFG ffg;
    FFG initial;
    ExecutionTrace bootstrap;
    std::vector<BugReport> bugs;  // unique, ids assigned
    std::size_t duplicate_reports = 0;
    std::vector<MetricsRow> metrics;
    std::vector<IterationLog> iterations;
    std::vector<std::string> log;
    std::size_t actions = 0;
};

/// Scenarios for one iteration, after phase filtering and per-strategy caps.
/// `last_seen` maps strategy|object to the iteration it last ran (updated).
std::vector<TestScenario> generate_iteration(const FFG& ffg, const SimulatorSession& fresh,
                                             const SemanticOracle& oracle, const RunConfig& cfg, std::size_t iter,
                                             std::map<std::string, std::size_t>& last_seen,
                                             std::vector<std::string>* notes = nullptr);

/// The loop without file output. Throws SpecError / GraphError.
RunResult run_loop(const RunConfig& cfg, std::shared_ptr<const AppSpec> spec);

/// Full CLI behavior: 0 clean, 2 spec error, 3 invariant violation.
int run(const RunConfig& cfg);

}  // namespace ffg
