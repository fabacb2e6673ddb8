#include "ffg/stv_generator.hpp"

#include "ffg/executor.hpp"

namespace ffg {

std::string cross_flow_mr_for(const std::string& tag) {
    for (const char* p : {"add_", "create_", "delete_", "remove_"}) {
        if (tag.starts_with(p)) return "create_delete";
    }
    for (const char* p : {"set_", "update_", "edit_"}) {
        if (tag.starts_with(p)) return "modify_attribute";
    }
    for (const char* p : {"consume_", "produce_", "acquire_", "release_"}) {
        if (tag.starts_with(p)) return "consume_produce";
    }
    return "";
}

namespace {

bool is_toggle(WidgetKind k) { return k == WidgetKind::Toggle || k == WidgetKind::Checkbox; }

const char* strategy_for(const std::string& mr) {
    if (mr == "hide_show") return strategy::kHideShow;
    if (mr == "change_order") return strategy::kChangeOrder;
    if (mr == "toggle") return strategy::kToggle;
    if (mr == "create_delete") return strategy::kCreateDelete;
    if (mr == "modify_attribute") return strategy::kModifyAttribute;
    return strategy::kConsumeProduce;
}

ActionStep rule_step(const TransitionRule& r) {
    return {r.source_page, r.widget, r.action, r.input.value_or("")};
}

// Rule on `page` that sets a visibility variable of that page, with the value it sets.
struct VisRule {
    const TransitionRule* rule;
    std::string var;
    std::string value;
};

std::vector<VisRule> visibility_rules(const AppSpec& spec, const std::string& page) {
    std::vector<VisRule> out;
    const std::string prefix = "visible__" + page + "__";
    for (const auto& r : spec.rules) {
        if (r.source_page != page || !r.target_page.empty() || r.abstract_op) continue;
        for (const auto& m : r.updates) {
            if (m.kind == Mutation::Set && m.var.starts_with(prefix)) out.push_back({&r, m.var, m.value});
        }
    }
    return out;
}

}  // namespace

std::vector<Variant> single_flow_variants(const Trace& pi, const AppSpec& spec) {
    std::vector<Variant> out;
    const auto& steps = pi.steps;
    auto widget_of = [&](const ActionStep& a) { return spec.widget(a.page, a.widget); };

    // change_order: reverse each maximal same-page run of order-independent steps.
    for (std::size_t i = 0; i < steps.size();) {
        std::size_t j = i;
        while (j < steps.size() && steps[j].page == steps[i].page && widget_of(steps[j]) &&
               widget_of(steps[j])->order_independent) {
            ++j;
        }
        if (j - i >= 2) {
            Variant v{{"change_order", MrLevel::SingleFlow, {{"from", std::to_string(i)}, {"to", std::to_string(j)}}},
                      steps};
            std::reverse(v.steps.begin() + i, v.steps.begin() + j);
            out.push_back(std::move(v));
        }
        i = j == i ? i + 1 : j;
    }

    // hide_show: show/hide a dynamic element before a step, restoring it when possible.
    std::set<std::string> done;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (const auto& vr : visibility_rules(spec, steps[i].page)) {
            ActionStep first = rule_step(*vr.rule);
            if (std::find(steps.begin(), steps.end(), first) != steps.end()) continue;
            if (!done.insert(vr.var + "|" + vr.value).second) continue;
            std::vector<ActionStep> inserted{first};
            for (const auto& other : visibility_rules(spec, steps[i].page)) {
                if (other.var == vr.var && other.value != vr.value) {
                    inserted.push_back(rule_step(*other.rule));
                    break;
                }
            }
            Variant v{{"hide_show", MrLevel::SingleFlow, {{"var", vr.var}, {"before", std::to_string(i)}}}, steps};
            v.steps.insert(v.steps.begin() + i, inserted.begin(), inserted.end());
            out.push_back(std::move(v));
        }
    }

    // toggle: drop optional toggles that pi uses, add those it skips.
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Widget* w = widget_of(steps[i]);
        if (w && w->optional && is_toggle(w->kind)) {
            Variant v{{"toggle", MrLevel::SingleFlow, {{"widget", w->id}, {"flip", "out"}}}, steps};
            v.steps.erase(v.steps.begin() + i);
            if (!v.steps.empty()) out.push_back(std::move(v));
        }
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        // insert before the last step on each page
        if (i + 1 < steps.size() && steps[i + 1].page == steps[i].page) continue;
        const Page* p = spec.page(steps[i].page);
        if (!p) continue;
        for (const auto& w : p->widgets) {
            if (!w.optional || !is_toggle(w.kind)) continue;
            bool used = std::any_of(steps.begin(), steps.end(),
                                    [&](const ActionStep& a) { return a.page == p->id && a.widget == w.id; });
            if (used) continue;
            Variant v{{"toggle", MrLevel::SingleFlow, {{"widget", w.id}, {"flip", "in"}}}, steps};
            v.steps.insert(v.steps.begin() + i, ActionStep{p->id, w.id, ActionKind::ToggleOn, ""});
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<TestScenario> gen_single_flow(const Flow& flow, const FFG& ffg, const SimulatorSession& base) {
    std::vector<TestScenario> out;
    const Trace& pi = ffg.trace(flow.source, flow.pi);
    ffg.trace(flow.target, flow.pi_prime);
    SpecOracle oracle;
    ScenarioExecutor ex(ffg, base.spec(), oracle);
    std::map<std::string, std::size_t> counts;
    for (auto& v : single_flow_variants(pi, base.spec())) {
        SimulatorSession probe = base.clone();
        auto nav = ex.plan_navigation(probe, {v.steps.front().page});
        if (!nav) continue;
        bool ok = true;
        for (const auto& a : *nav) ok = ok && probe.perform(a).ok();
        for (const auto& a : v.steps) ok = ok && probe.perform(a).ok();
        if (!ok) continue;
        const char* strat = strategy_for(v.mr.tag);
        std::map<std::string, std::string> params = v.mr.params;
        TestScenario s;
        s.type = ScenarioType::STV;
        s.strategy = strat;
        s.object = flow.id;
        s.id = scenario_tag(strat, flow.id, ++counts[v.mr.tag]);
        s.guidance = {ApplyVariant{flow.source, flow.pi, v.mr.tag, std::move(params), std::move(v.steps)},
                      ExecuteTrace{flow.target, flow.pi_prime},
                      Observe{"mr_conservation", {{"variant", "0"}, {"target", "1"}, {"flow", flow.id}, {"mr", v.mr.tag}}}};
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// First abstract op on `steps` that a rule attaches and whose updates touch `var`.
struct OpHit {
    std::string tag;
    std::string mr;
};

std::optional<OpHit> op_on(const Trace& t, const AppSpec& spec, const std::string& var) {
    for (const auto& a : t.steps) {
        if (a.action == ActionKind::Back) continue;
        for (const auto* r : spec.rules_for(a.page, a.widget, a.action)) {
            if (!r->abstract_op) continue;
            bool touches = std::any_of(r->updates.begin(), r->updates.end(),
                                       [&](const Mutation& m) { return m.var == var; });
            std::string mr = cross_flow_mr_for(r->abstract_op->tag);
            if (touches && !mr.empty()) return OpHit{r->abstract_op->tag, mr};
        }
    }
    return std::nullopt;
}

bool is_removal(const std::string& tag) { return tag.starts_with("delete_") || tag.starts_with("remove_"); }

}  // namespace

std::vector<TestScenario> gen_cross_flow(const FFG& ffg, const AppSpec& spec) {
    std::vector<TestScenario> out;
    std::set<std::string> seen;
    std::map<std::string, std::size_t> counts;
    for (const auto& pair : shared_data_pairs(ffg)) {
        for (int orient = 0; orient < 2; ++orient) {
            const std::string& n = orient == 0 ? pair.a : pair.b;
            const std::string& n2 = orient == 0 ? pair.b : pair.a;
            for (const auto& d : pair.vars) {
                auto into = find_flows_into(ffg, n2, d);
                if (into.empty()) continue;
                // one trace of n per MR family: the first carrying a matching op
                std::map<std::string, std::pair<const Trace*, std::string>> by_mr;
                for (const auto& t : ffg.functionality(n).traces) {
                    auto hit = op_on(t, spec, d);
                    if (hit && !by_mr.contains(hit->mr)) by_mr[hit->mr] = {&t, hit->tag};
                }
                for (const auto& [mr, tt] : by_mr) {
                    const auto& [t, tag] = tt;
                    // a removal needs something to remove: create it through n' first
                    const Trace* creator = nullptr;
                    if (is_removal(tag)) {
                        for (const auto& c : ffg.functionality(n2).traces) {
                            auto hit = op_on(c, spec, d);
                            if (hit && hit->mr == "create_delete" && !is_removal(hit->tag)) {
                                creator = &c;
                                break;
                            }
                        }
                        if (!creator) continue;
                    }
                    for (const auto& e : into) {
                        std::string key = mr + "|" + n + "|" + t->id + "|" + e.id;
                        if (!seen.insert(key).second) continue;
                        std::vector<PlanStep> plan;
                        if (creator) plan.push_back(ExecuteTrace{n2, creator->id});
                        plan.push_back(ExecuteTrace{n, t->id});
                        plan.push_back(ExecuteTrace{e.source, e.pi});
                        plan.push_back(ExecuteTrace{e.target, e.pi_prime});
                        plan.push_back(Observe{"expected_effect",
                                               {{"flow", e.id}, {"mr", mr}, {"var", d}, {"via", n + "/" + t->id}}});
                        const char* strat = strategy_for(mr);
                        TestScenario s;
                        s.type = ScenarioType::STV;
                        s.strategy = strat;
                        s.object = e.id;
                        s.id = scenario_tag(strat, e.id, ++counts[std::string(strat) + e.id]);
                        s.guidance = std::move(plan);
                        out.push_back(std::move(s));
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace ffg
