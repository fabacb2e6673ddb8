#pragma once

// Long-term-view scenarios: functionality completeness and independence,
// plus partition / minimal-violation / invariant probes of flow conditions.

#include <memory>
#include <vector>

#include "ffg/oracle.hpp"
#include "ffg/scenario.hpp"

namespace ffg {

struct LtvConfig {
    double sep_threshold = 0.5;
    double intra_threshold = 0.7;
    std::size_t max_alpha = 4;
};

std::vector<TestScenario> gen_completeness(const FFG& ffg, const AppSpec& spec, const SemanticOracle& oracle);
std::vector<TestScenario> gen_independence(const FFG& ffg, const SemanticOracle& oracle, double sep_threshold,
                                           double intra_threshold = 0.7);
std::vector<TestScenario> gen_condition_partition(const Flow& flow, const FFG& ffg, const AppSpec& spec);
/// `notes` collects skipped violating conditions, when given.
std::vector<TestScenario> gen_minimal_violation(const Flow& flow, const FFG& ffg, const AppSpec& spec,
                                                std::vector<std::string>* notes = nullptr);
/// alpha candidates are checked on clones of `base` (a fresh session).
std::vector<TestScenario> gen_condition_invariant(const Flow& flow, const FFG& ffg, const SimulatorSession& base,
                                                  std::size_t max_alpha = 4);

/// Ids are "<strategy-name>:<object>:<n>"; the harness renumbers them.
std::string scenario_tag(const std::string& strategy, const std::string& object, std::size_t n);

}  // namespace ffg
