#pragma once

// Semantic judgments: page goals, goal similarity, essential actions,
// trace-goal clustering and flow-condition inference.

#include <atomic>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ffg/ffg.hpp"

namespace ffg {

class SemanticOracle {
public:
    virtual ~SemanticOracle() = default;
    virtual std::string name() const = 0;

    virtual GoalDescriptor infer_page_goal(const Page& page) const = 0;
    virtual double similarity(const GoalDescriptor& a, const GoalDescriptor& b) const = 0;
    virtual std::vector<ActionStep> essential_actions(const Functionality& func, const AppSpec& spec) const = 0;
    virtual ClusterResult cluster_trace_goals(const std::vector<std::pair<std::string, GoalDescriptor>>& goals,
                                              double intra_threshold) const = 0;
    virtual Condition infer_flow_condition(const Valuation& prefix_state, const Functionality& target,
                                           const AppSpec& spec) const = 0;
};

/// Deterministic oracle driven by the app spec's annotations. Stateless.
class SpecOracle : public SemanticOracle {
public:
    std::string name() const override { return "spec"; }
    GoalDescriptor infer_page_goal(const Page& page) const override;
    double similarity(const GoalDescriptor& a, const GoalDescriptor& b) const override;
    std::vector<ActionStep> essential_actions(const Functionality& func, const AppSpec& spec) const override;
    ClusterResult cluster_trace_goals(const std::vector<std::pair<std::string, GoalDescriptor>>& goals,
                                      double intra_threshold) const override;
    Condition infer_flow_condition(const Valuation& prefix_state, const Functionality& target,
                                   const AppSpec& spec) const override;
};

/// Default action for a widget: input uses the first declared value,
/// toggles and checkboxes switch on, everything else clicks.
ActionStep default_action(const std::string& page, const Widget& w);

/// Oracle that asks an HTTP text-completion endpoint for page goals and
/// falls back to SpecOracle for everything else (and on any failure).
class RemoteOracle : public SpecOracle {
public:
    explicit RemoteOracle(std::string endpoint);
    std::string name() const override { return "remote"; }
    GoalDescriptor infer_page_goal(const Page& page) const override;
    std::size_t failures() const { return failures_; }

private:
    std::string endpoint_;
    mutable std::atomic<std::size_t> failures_{0};
};

std::unique_ptr<SemanticOracle> make_oracle(const std::string& kind);

}  // namespace ffg
