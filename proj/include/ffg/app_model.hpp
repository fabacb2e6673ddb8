#pragma once

// Declarative simulated app: pages of widgets, guarded transition rules over
// finite-domain state, and a deterministic session that executes actions.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffg/condition.hpp"

namespace ffg {

class SpecError : public Error {
public:
    using Error::Error;
};

enum class WidgetKind { Button, Input, Toggle, Checkbox, ListItem, Icon };
std::string_view widget_kind_name(WidgetKind k);
std::optional<WidgetKind> parse_widget_kind(std::string_view s);

struct Widget {
    std::string id;
    WidgetKind kind = WidgetKind::Button;
    std::string text;
    std::set<std::string> topics;
    bool visible = true;
    bool enabled = true;
    bool optional = false;
    bool order_independent = false;
    std::vector<std::string> values;  // candidate input texts
};

struct Page {
    std::string id;
    std::string title;
    std::vector<Widget> widgets;
    std::string goal_label;
    std::vector<double> goal_vector;
    std::set<std::string> topics;
    std::set<std::string> touched_vars;

    const Widget* widget(std::string_view wid) const;
};

enum class ActionKind { Click, Input, ToggleOn, ToggleOff, Back };
std::string_view action_kind_name(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view s);

struct ActionStep {
    std::string page;
    std::string widget;  // empty for back
    ActionKind action = ActionKind::Click;
    std::string text;    // input text

    static ActionStep back(std::string page) { return {std::move(page), "", ActionKind::Back, ""}; }
    std::string render() const;
    friend bool operator==(const ActionStep&, const ActionStep&) = default;
    friend auto operator<=>(const ActionStep&, const ActionStep&) = default;
};

struct Mutation {
    enum Kind { Set, Insert, Remove } kind = Set;
    std::string var;
    std::string value;  // template; ${name} expands to a pre-step scalar or ${input}
};

struct Event {
    enum Kind { Crash, Toast } kind = Toast;
    std::string text;  // crash signal or toast message
    friend bool operator==(const Event&, const Event&) = default;
};

struct AbstractOpTemplate {
    std::string tag;
    std::map<std::string, std::string> args;  // argument name -> value template
};

struct AbstractOp {
    std::string tag;
    std::map<std::string, std::string> args;
    std::string render() const;
    friend bool operator==(const AbstractOp&, const AbstractOp&) = default;
};

struct TransitionRule {
    std::string source_page;
    std::string widget;
    ActionKind action = ActionKind::Click;
    std::optional<std::string> input;  // matches the input text when set
    Condition guard;
    std::string target_page;  // empty: stay
    std::vector<Mutation> updates;
    std::vector<Event> events;
    std::optional<AbstractOpTemplate> abstract_op;
};

struct ExpectedEffect {
    std::string abstract_op;
    std::string postcondition;  // condition text with {arg} placeholders
    std::string description;

    Condition instantiate(const std::map<std::string, std::string>& args) const;
};

struct InjectedBug {
    std::string id;
    std::string kind;   // crash | functional
    std::string match;  // violated op tag, crash signal or MR tag
    std::string page;
    std::string description;
};

struct AppSpec {
    std::string name;
    std::vector<VarDecl> var_decls;
    Valuation initial_valuation;
    std::vector<Page> pages;
    std::vector<TransitionRule> rules;
    std::vector<ExpectedEffect> expected_effects;
    std::string main_page;
    std::size_t embedding_dim = 0;
    std::optional<std::vector<ActionStep>> bootstrap;
    std::vector<std::string> anomalous_toasts;
    std::vector<InjectedBug> injected_bugs;

    const Page* page(std::string_view id) const;
    const Widget* widget(std::string_view page_id, std::string_view widget_id) const;
    const VarDecl* decl(std::string_view var) const { return find_decl(var_decls, var); }
    const ExpectedEffect* expected_effect(std::string_view tag) const;
    std::vector<const TransitionRule*> rules_for(std::string_view page, std::string_view widget,
                                                 ActionKind action) const;

    /// Full load-time validation; throws SpecError with a location prefix.
    void validate() const;
};

std::string visibility_var(std::string_view page, std::string_view widget);
std::string enabled_var(std::string_view page, std::string_view widget);

enum class StepStatus { Ok, WidgetMissing, WidgetDisabled, GuardUnmet, Crashed };
std::string_view step_status_name(StepStatus s);

struct StepOutcome {
    StepStatus status = StepStatus::Ok;
    std::string page_before;
    std::optional<std::string> new_page;
    std::vector<Event> events;
    std::optional<AbstractOp> abstract_op;
    Valuation state_before;
    Valuation state_after;
    bool ok() const { return status == StepStatus::Ok; }
};

struct Snapshot {
    std::string page;
    Valuation valuation;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

class SimulatorSession {
public:
    SimulatorSession(std::shared_ptr<const AppSpec> spec, std::uint64_t seed);

    StepOutcome perform(const ActionStep& step);
    Snapshot snapshot() const { return {current_page_, valuation_}; }
    SimulatorSession clone() const { return *this; }

    const AppSpec& spec() const { return *spec_; }
    std::shared_ptr<const AppSpec> spec_ptr() const { return spec_; }
    const std::string& current_page() const { return current_page_; }
    const Valuation& valuation() const { return valuation_; }
    std::size_t step_count() const { return step_count_; }
    bool crashed() const { return crashed_; }
    std::uint64_t seed() const { return seed_; }

    bool widget_visible(std::string_view page, const Widget& w) const;
    bool widget_enabled(std::string_view page, const Widget& w) const;
    /// Rule that would fire for `step` in the current state, if any.
    const TransitionRule* matching_rule(const ActionStep& step) const;

private:
    std::shared_ptr<const AppSpec> spec_;
    std::string current_page_;
    Valuation valuation_;
    std::vector<std::string> history_;
    std::size_t step_count_ = 0;
    bool crashed_ = false;
    std::uint64_t seed_ = 0;
};

SimulatorSession reset(std::shared_ptr<const AppSpec> spec, std::uint64_t seed);

/// Expands ${name} against a valuation (scalars only) plus `input`.
std::string expand_template(const std::string& tmpl, const Valuation& val, const std::string& input);

}  // namespace ffg
