#include "ffg/app_model.hpp"

#include <algorithm>

namespace ffg {

std::string_view widget_kind_name(WidgetKind k) {
    switch (k) {
        case WidgetKind::Button:
            return "button";
        case WidgetKind::Input:
            return "input";
        case WidgetKind::Toggle:
            return "toggle";
        case WidgetKind::Checkbox:
            return "checkbox";
        case WidgetKind::ListItem:
            return "list_item";
        case WidgetKind::Icon:
            return "icon";
    }
    return "?";
}

std::optional<WidgetKind> parse_widget_kind(std::string_view s) {
    for (auto k : {WidgetKind::Button, WidgetKind::Input, WidgetKind::Toggle, WidgetKind::Checkbox,
                   WidgetKind::ListItem, WidgetKind::Icon}) {
        if (widget_kind_name(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::Click:
            return "click";
        case ActionKind::Input:
            return "input";
        case ActionKind::ToggleOn:
            return "toggle_on";
        case ActionKind::ToggleOff:
            return "toggle_off";
        case ActionKind::Back:
            return "back";
    }
    return "?";
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
    for (auto k : {ActionKind::Click, ActionKind::Input, ActionKind::ToggleOn, ActionKind::ToggleOff,
                   ActionKind::Back}) {
        if (action_kind_name(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view step_status_name(StepStatus s) {
    switch (s) {
        case StepStatus::Ok:
            return "ok";
        case StepStatus::WidgetMissing:
            return "widget_missing";
        case StepStatus::WidgetDisabled:
            return "widget_disabled";
        case StepStatus::GuardUnmet:
            return "guard_unmet";
        case StepStatus::Crashed:
            return "crashed";
    }
    return "?";
}

std::string ActionStep::render() const {
    if (action == ActionKind::Back) return "back@" + page;
    std::string out = std::string(action_kind_name(action)) + " " + widget + "@" + page;
    if (action == ActionKind::Input) out += " \"" + text + "\"";
    return out;
}

std::string AbstractOp::render() const {
    std::string out = tag + "(";
    bool first = true;
    for (const auto& [k, v] : args) {
        if (!first) out += ", ";
        out += k + "=" + v;
        first = false;
    }
    return out + ")";
}

const Widget* Page::widget(std::string_view wid) const {
    for (const auto& w : widgets) {
        if (w.id == wid) return &w;
    }
    return nullptr;
}

Condition ExpectedEffect::instantiate(const std::map<std::string, std::string>& args) const {
    std::string text;
    for (std::size_t i = 0; i < postcondition.size(); ++i) {
        if (postcondition[i] == '{') {
            auto close = postcondition.find('}', i);
            if (close == std::string::npos) throw SpecError("unterminated placeholder in '" + postcondition + "'");
            std::string name = postcondition.substr(i + 1, close - i - 1);
            auto it = args.find(name);
            if (it == args.end()) {
                throw SpecError("expected effect '" + abstract_op + "' references unbound argument '" + name + "'");
            }
            text += it->second;
            i = close;
        } else {
            text.push_back(postcondition[i]);
        }
    }
    return Condition::parse(text);
}

std::string visibility_var(std::string_view page, std::string_view widget) {
    return "visible__" + std::string(page) + "__" + std::string(widget);
}

std::string enabled_var(std::string_view page, std::string_view widget) {
    return "enabled__" + std::string(page) + "__" + std::string(widget);
}

std::string expand_template(const std::string& tmpl, const Valuation& val, const std::string& input) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '$' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            auto close = tmpl.find('}', i);
            if (close == std::string::npos) throw SpecError("unterminated ${ in template '" + tmpl + "'");
            std::string name = tmpl.substr(i + 2, close - i - 2);
            if (name == "input") {
                out += input;
            } else {
                auto it = val.find(name);
                if (it == val.end()) throw UnboundVariableError(name);
                const auto* s = std::get_if<std::string>(&it->second);
                if (!s) throw SpecError("template '" + tmpl + "' expands set variable '" + name + "'");
                out += *s;
            }
            i = close;
        } else {
            out.push_back(tmpl[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// AppSpec

const Page* AppSpec::page(std::string_view id) const {
    for (const auto& p : pages) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

const Widget* AppSpec::widget(std::string_view page_id, std::string_view widget_id) const {
    const Page* p = page(page_id);
    return p ? p->widget(widget_id) : nullptr;
}

const ExpectedEffect* AppSpec::expected_effect(std::string_view tag) const {
    for (const auto& e : expected_effects) {
        if (e.abstract_op == tag) return &e;
    }
    return nullptr;
}

std::vector<const TransitionRule*> AppSpec::rules_for(std::string_view page, std::string_view widget,
                                                      ActionKind action) const {
    std::vector<const TransitionRule*> out;
    for (const auto& r : rules) {
        if (r.source_page == page && r.widget == widget && r.action == action) out.push_back(&r);
    }
    return out;
}

namespace {

bool has_placeholder(const std::string& s) { return s.find("${") != std::string::npos; }

void check_step(const AppSpec& spec, const ActionStep& s, const std::string& where) {
    if (!spec.page(s.page)) throw SpecError(where + ": unknown page '" + s.page + "'");
    if (s.action != ActionKind::Back && !spec.widget(s.page, s.widget)) {
        throw SpecError(where + ": unknown widget '" + s.widget + "' on page '" + s.page + "'");
    }
}

}  // namespace

void AppSpec::validate() const {
    if (embedding_dim == 0) throw SpecError("embedding_dim: must be positive");

    std::set<std::string> names;
    for (std::size_t i = 0; i < var_decls.size(); ++i) {
        const auto& d = var_decls[i];
        std::string where = "variables[" + std::to_string(i) + "]";
        if (!names.insert(d.name).second) throw SpecError(where + ": duplicate variable '" + d.name + "'");
        bool special = d.name.rfind("visible__", 0) == 0 || d.name.rfind("enabled__", 0) == 0;
        if (special && d.kind != DomainKind::Boolean) {
            throw SpecError(where + ": '" + d.name + "' must be boolean");
        }
    }
    if (auto space = assignment_space_size(var_decls); space > EnumerationCapError::kCap) {
        throw SpecError(std::string("variables: ") + EnumerationCapError(space).what());
    }
    for (const auto& d : var_decls) {
        auto it = initial_valuation.find(d.name);
        if (it == initial_valuation.end()) throw SpecError("initial: no value for '" + d.name + "'");
        if (!value_in_domain(d, it->second)) {
            throw SpecError("initial: value " + render_value(it->second) + " outside the domain of '" + d.name + "'");
        }
    }
    for (const auto& [k, v] : initial_valuation) {
        if (!decl(k)) throw SpecError("initial: undeclared variable '" + k + "'");
    }

    std::set<std::string> page_ids;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const auto& p = pages[i];
        std::string where = "pages[" + std::to_string(i) + "]";
        if (!page_ids.insert(p.id).second) throw SpecError(where + ": duplicate page id '" + p.id + "'");
        if (p.goal_vector.size() != embedding_dim) {
            throw SpecError(where + ": goal vector length " + std::to_string(p.goal_vector.size()) +
                            " != embedding_dim " + std::to_string(embedding_dim));
        }
        for (const auto& v : p.touched_vars) {
            if (!decl(v)) throw SpecError(where + ": touched variable '" + v + "' is not declared");
        }
        std::set<std::string> wids;
        for (const auto& w : p.widgets) {
            if (!wids.insert(w.id).second) throw SpecError(where + ": duplicate widget id '" + w.id + "'");
        }
    }
    if (!page(main_page)) throw SpecError("main_page: unknown page '" + main_page + "'");

    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& r = rules[i];
        std::string where = "rules[" + std::to_string(i) + "]";
        if (r.action == ActionKind::Back) throw SpecError(where + ": back is built in and takes no rules");
        check_step(*this, {r.source_page, r.widget, r.action, ""}, where);
        if (!r.target_page.empty() && !page(r.target_page)) {
            throw SpecError(where + ": unknown target page '" + r.target_page + "'");
        }
        try {
            validate_condition(r.guard, var_decls);
        } catch (const ConditionError& e) {
            throw SpecError(where + ".guard: " + e.what());
        }
        for (const auto& m : r.updates) {
            const VarDecl* d = decl(m.var);
            if (!d) throw SpecError(where + ".updates: undeclared variable '" + m.var + "'");
            bool set_op = m.kind != Mutation::Set;
            if (set_op != d->is_set()) throw SpecError(where + ".updates: mutation kind does not fit '" + m.var + "'");
            if (!has_placeholder(m.value)) {
                bool ok = set_op ? d->element_index(m.value) >= 0 : d->scalar_index(m.value) >= 0;
                if (!ok) throw SpecError(where + ".updates: '" + m.value + "' outside the domain of '" + m.var + "'");
            }
        }
        auto crashes = std::count_if(r.events.begin(), r.events.end(), [](const Event& e) { return e.kind == Event::Crash; });
        if (crashes > 1) throw SpecError(where + ".events: more than one crash event");
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = i + 1; j < rules.size(); ++j) {
            const auto& a = rules[i];
            const auto& b = rules[j];
            if (a.source_page != b.source_page || a.widget != b.widget || a.action != b.action) continue;
            if (a.input && b.input && *a.input != *b.input) continue;
            if (is_satisfiable(conjoin(a.guard, b.guard), var_decls)) {
                throw SpecError("rules[" + std::to_string(i) + "] and rules[" + std::to_string(j) +
                                "]: overlapping guards on " + a.widget + "@" + a.source_page);
            }
        }
    }

    std::set<std::string> tags;
    for (std::size_t i = 0; i < expected_effects.size(); ++i) {
        const auto& e = expected_effects[i];
        if (!tags.insert(e.abstract_op).second) {
            throw SpecError("expected_effects[" + std::to_string(i) + "]: duplicate op '" + e.abstract_op + "'");
        }
    }
    if (bootstrap) {
        for (std::size_t i = 0; i < bootstrap->size(); ++i) {
            check_step(*this, (*bootstrap)[i], "bootstrap[" + std::to_string(i) + "]");
        }
    }
}

// ---------------------------------------------------------------------------
// Session

SimulatorSession::SimulatorSession(std::shared_ptr<const AppSpec> spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
    current_page_ = spec_->main_page;
    valuation_ = spec_->initial_valuation;
}

SimulatorSession reset(std::shared_ptr<const AppSpec> spec, std::uint64_t seed) {
    return SimulatorSession(std::move(spec), seed);
}

bool SimulatorSession::widget_visible(std::string_view page, const Widget& w) const {
    auto it = valuation_.find(visibility_var(page, w.id));
    if (it == valuation_.end()) return w.visible;
    return std::get<std::string>(it->second) == "true";
}

bool SimulatorSession::widget_enabled(std::string_view page, const Widget& w) const {
    auto it = valuation_.find(enabled_var(page, w.id));
    if (it == valuation_.end()) return w.enabled;
    return std::get<std::string>(it->second) == "true";
}

const TransitionRule* SimulatorSession::matching_rule(const ActionStep& step) const {
    for (const auto* r : spec_->rules_for(step.page, step.widget, step.action)) {
        if (r->input && *r->input != step.text) continue;
        if (evaluate(r->guard, valuation_)) return r;
    }
    return nullptr;
}

StepOutcome SimulatorSession::perform(const ActionStep& step) {
    if (crashed_) throw Error("perform on a crashed session");
    ++step_count_;
    StepOutcome out;
    out.page_before = current_page_;
    out.state_before = valuation_;

    auto finish = [&](StepStatus st) {
        out.status = st;
        out.state_after = valuation_;
        if (st == StepStatus::Ok || st == StepStatus::Crashed) out.new_page = current_page_;
        return out;
    };

    if (step.action == ActionKind::Back) {
        if (!history_.empty()) {
            current_page_ = history_.back();
            history_.pop_back();
        }
        return finish(StepStatus::Ok);
    }
    if (step.page != current_page_) return finish(StepStatus::WidgetMissing);
    const Widget* w = spec_->widget(current_page_, step.widget);
    if (!w || !widget_visible(current_page_, *w)) return finish(StepStatus::WidgetMissing);
    if (!widget_enabled(current_page_, *w)) return finish(StepStatus::WidgetDisabled);

    auto candidates = spec_->rules_for(step.page, step.widget, step.action);
    if (candidates.empty()) return finish(StepStatus::Ok);  // inert widget
    const TransitionRule* rule = matching_rule(step);
    if (!rule) return finish(StepStatus::GuardUnmet);

    const Valuation pre = valuation_;
    out.events = rule->events;
    if (rule->abstract_op) {
        AbstractOp op{rule->abstract_op->tag, {}};
        for (const auto& [k, v] : rule->abstract_op->args) op.args[k] = expand_template(v, pre, step.text);
        out.abstract_op = std::move(op);
    }
    bool crash = std::any_of(rule->events.begin(), rule->events.end(),
                             [](const Event& e) { return e.kind == Event::Crash; });
    if (crash) {
        crashed_ = true;
        return finish(StepStatus::Crashed);
    }
    for (const auto& m : rule->updates) {
        const VarDecl* d = spec_->decl(m.var);
        std::string v = expand_template(m.value, pre, step.text);
        bool ok = m.kind == Mutation::Set ? d->scalar_index(v) >= 0 : d->element_index(v) >= 0;
        if (!ok) throw Error("update leaves the domain of '" + m.var + "' with value '" + v + "'");
        switch (m.kind) {
            case Mutation::Set:
                valuation_[m.var] = v;
                break;
            case Mutation::Insert:
                std::get<ElementSet>(valuation_[m.var]).insert(v);
                break;
            case Mutation::Remove:
                std::get<ElementSet>(valuation_[m.var]).erase(v);
                break;
        }
    }
    if (!rule->target_page.empty() && rule->target_page != current_page_) {
        history_.push_back(current_page_);
        if (history_.size() > 32) history_.erase(history_.begin());
        current_page_ = rule->target_page;
    }
    return finish(StepStatus::Ok);
}

}  // namespace ffg
