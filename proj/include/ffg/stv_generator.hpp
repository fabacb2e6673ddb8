#pragma once

// Short-term-view scenarios: metamorphic variants of a flow's source trace
// (single-flow) and data-state transformations through shared variables
// (cross-flow).

#include <vector>

#include "ffg/ltv_generator.hpp"

namespace ffg {

enum class MrLevel { SingleFlow, CrossFlow };

struct MetamorphicRelation {
    std::string tag;  // hide_show | change_order | toggle | create_delete | modify_attribute | consume_produce
    MrLevel level = MrLevel::SingleFlow;
    std::map<std::string, std::string> params;
};

struct Variant {
    MetamorphicRelation mr;
    std::vector<ActionStep> steps;
};

/// Widget-level variants of `pi` (without the generation-time check).
std::vector<Variant> single_flow_variants(const Trace& pi, const AppSpec& spec);

/// Variants that run all-ok on a clone of `base` become scenarios.
std::vector<TestScenario> gen_single_flow(const Flow& flow, const FFG& ffg, const SimulatorSession& base);

std::vector<TestScenario> gen_cross_flow(const FFG& ffg, const AppSpec& spec);

/// MR family selected by an abstract-op tag prefix; empty when none.
std::string cross_flow_mr_for(const std::string& op_tag);

}  // namespace ffg
