#pragma once

// Test scenarios: (type, strategy, object, guidance) with guidance as a plan.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ffg/ffg_io.hpp"

namespace ffg {

struct NavigateTo {
    std::string target;  // functionality id or page id
    bool is_page = false;
};

struct ExecuteTrace {
    std::string func;
    std::string trace;
};

struct ExecuteActions {
    std::vector<ActionStep> actions;
    bool explore_after = false;
    std::string home_func;  // exploration stops on returning to a page of this node
};

struct EstablishCondition {
    Condition phi;
};

struct ApplyVariant {
    std::string func;
    std::string trace;
    std::string mr;
    std::map<std::string, std::string> params;
    std::vector<ActionStep> variant;
};

struct Observe {
    std::string check;  // goal_progress | flow_outcome | mr_conservation | divergence | expected_effect
    std::map<std::string, std::string> params;
};

using PlanStep = std::variant<NavigateTo, ExecuteTrace, ExecuteActions, EstablishCondition, ApplyVariant, Observe>;

enum class ScenarioType { LTV, STV };

struct TestScenario {
    std::string id;
    ScenarioType type = ScenarioType::LTV;
    std::string strategy;  // ltv/<name> or stv/<mr>
    std::string object;    // functionality or flow id
    std::vector<PlanStep> guidance;
};

namespace strategy {
inline constexpr const char* kCompleteness = "ltv/completeness";
inline constexpr const char* kIndependence = "ltv/independence";
inline constexpr const char* kPartition = "ltv/partition";
inline constexpr const char* kMinimalViolation = "ltv/minimal_violation";
inline constexpr const char* kInvariant = "ltv/invariant";
inline constexpr const char* kHideShow = "stv/hide_show";
inline constexpr const char* kChangeOrder = "stv/change_order";
inline constexpr const char* kToggle = "stv/toggle";
inline constexpr const char* kCreateDelete = "stv/create_delete";
inline constexpr const char* kModifyAttribute = "stv/modify_attribute";
inline constexpr const char* kConsumeProduce = "stv/consume_produce";
}  // namespace strategy

/// Ablation phase a strategy belongs to: ltv-func, ltv-flow, stv-single or stv-cross.
std::string phase_of(const std::string& strategy);

std::string render_plan_step(const PlanStep& step);
json to_json(const PlanStep& step);
json to_json(const TestScenario& s);

/// Checks every referenced functionality, trace and flow against the graph.
bool well_formed(const TestScenario& s, const FFG& ffg, const AppSpec& spec);

}  // namespace ffg
