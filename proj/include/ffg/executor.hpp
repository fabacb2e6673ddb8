#pragma once

// Drives a session through a scenario plan: navigation, condition
// establishment, recovery, and continuous bug detection.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffg/oracle.hpp"
#include "ffg/scenario.hpp"

namespace ffg {

struct ExecutorConfig {
    std::size_t scenario_budget = 60;
    int max_recoveries = 3;
    int establish_depth = 3;
    int nav_depth = 8;
    std::size_t explore_burst = 8;
};

struct BugReport {
    std::string id;  // assigned after dedup
    std::string kind;  // crash | functional
    std::string scenario;
    std::string violation_kind;  // crash_signal | expected_effect | mr_violation | toast_anomaly
    json violation;
    std::string page;
    Valuation state_snapshot;
    std::string dedup_key;
    std::size_t step_index = 0;
    ExecutionTrace trace;
};

json to_json(const BugReport& r);

/// FNV-1a over kind, essence and page, as 16 hex digits.
std::string make_dedup_key(const std::string& kind, const std::string& essence, const std::string& page);

struct ScenarioResult {
    std::string scenario_id;
    ExecutionTrace trace;
    std::vector<BugReport> reports;
    std::size_t actions = 0;
    bool completed = false;
};

class ScenarioExecutor {
public:
    ScenarioExecutor(const FFG& ffg, const AppSpec& spec, const SemanticOracle& oracle, ExecutorConfig cfg = {});

    /// Runs the plan on `session` (normally freshly reset). Never throws for
    /// plan-level failures; they end the scenario with a diagnostic.
    ScenarioResult execute(const TestScenario& s, SimulatorSession& session, std::size_t budget) const;

    /// Shortest action path (on clones) to a session whose page is in `targets`.
    std::optional<std::vector<ActionStep>> plan_navigation(const SimulatorSession& from,
                                                           const std::set<std::string>& targets) const;
    /// Path of known traces (with navigation) after which `phi` holds.
    std::optional<std::vector<ActionStep>> plan_establish(const SimulatorSession& from, const Condition& phi) const;
    /// One recovery action for a failed step, or nullopt when out of options.
    std::optional<ActionStep> plan_recovery(const SimulatorSession& at, const ActionStep& failed,
                                            const StepOutcome& outcome) const;
    /// Reports raised by one performed step.
    std::vector<BugReport> detect(const ExecStep& step, const std::string& scenario_id) const;

    /// Performs navigation / establishment on the session, recording steps.
    ExecutionTrace navigate_to(SimulatorSession& session, const std::string& target, bool is_page,
                               std::size_t budget, bool* reached = nullptr) const;
    ExecutionTrace establish_condition(SimulatorSession& session, const Condition& phi, std::size_t budget,
                                       bool* reached = nullptr) const;

    const ExecutorConfig& config() const { return cfg_; }
    std::set<std::string> target_pages(const std::string& func) const;

private:
    friend class ScenarioRun;
    const FFG& ffg_;
    const AppSpec& spec_;
    const SemanticOracle& oracle_;
    ExecutorConfig cfg_;
    std::set<ActionStep> known_moves_;
};

/// Every distinct action worth trying on `page` in the session's current state.
std::vector<ActionStep> candidate_actions(const SimulatorSession& s, const std::string& page);

}  // namespace ffg
