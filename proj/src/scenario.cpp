#include "ffg/scenario.hpp"

namespace ffg {

std::string phase_of(const std::string& s) {
    if (s == strategy::kCompleteness || s == strategy::kIndependence) return "ltv-func";
    if (s == strategy::kPartition || s == strategy::kMinimalViolation || s == strategy::kInvariant) return "ltv-flow";
    if (s == strategy::kHideShow || s == strategy::kChangeOrder || s == strategy::kToggle) return "stv-single";
    if (s == strategy::kCreateDelete || s == strategy::kModifyAttribute || s == strategy::kConsumeProduce) {
        return "stv-cross";
    }
    return "unknown";
}

namespace {

std::string render_steps(const std::vector<ActionStep>& steps) {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out += ", ";
        out += steps[i].render();
    }
    return out;
}

struct Renderer {
    std::string operator()(const NavigateTo& s) const {
        return "navigate to " + std::string(s.is_page ? "page " : "") + s.target;
    }
    std::string operator()(const ExecuteTrace& s) const { return "execute " + s.func + "/" + s.trace; }
    std::string operator()(const ExecuteActions& s) const {
        return "perform [" + render_steps(s.actions) + "]" + (s.explore_after ? " then explore" : "");
    }
    std::string operator()(const EstablishCondition& s) const { return "establish " + s.phi.render(); }
    std::string operator()(const ApplyVariant& s) const {
        return "variant " + s.mr + " of " + s.func + "/" + s.trace + ": [" + render_steps(s.variant) + "]";
    }
    std::string operator()(const Observe& s) const { return "observe " + s.check; }
};

json steps_json(const std::vector<ActionStep>& steps) {
    json arr = json::array();
    for (const auto& s : steps) arr.push_back(to_json(s));
    return arr;
}

struct Jsoner {
    json operator()(const NavigateTo& s) const {
        return {{"op", "navigate_to"}, {"target", s.target}, {"is_page", s.is_page}};
    }
    json operator()(const ExecuteTrace& s) const {
        return {{"op", "execute_trace"}, {"func", s.func}, {"trace", s.trace}};
    }
    json operator()(const ExecuteActions& s) const {
        return {{"op", "execute_actions"},
                {"actions", steps_json(s.actions)},
                {"explore_after", s.explore_after},
                {"home_func", s.home_func}};
    }
    json operator()(const EstablishCondition& s) const {
        return {{"op", "establish_condition"}, {"phi", s.phi.render()}};
    }
    json operator()(const ApplyVariant& s) const {
        return {{"op", "apply_variant"}, {"func", s.func},         {"trace", s.trace},
                {"mr", s.mr},            {"params", s.params},     {"variant", steps_json(s.variant)}};
    }
    json operator()(const Observe& s) const { return {{"op", "observe"}, {"check", s.check}, {"params", s.params}}; }
};

}  // namespace

std::string render_plan_step(const PlanStep& step) { return std::visit(Renderer{}, step); }

json to_json(const PlanStep& step) { return std::visit(Jsoner{}, step); }

json to_json(const TestScenario& s) {
    json plan = json::array();
    for (const auto& p : s.guidance) plan.push_back(to_json(p));
    json text = json::array();
    for (const auto& p : s.guidance) text.push_back(render_plan_step(p));
    return {{"id", s.id},
            {"type", s.type == ScenarioType::LTV ? "LTV" : "STV"},
            {"strategy", s.strategy},
            {"object", s.object},
            {"plan", plan},
            {"guidance", text}};
}

bool well_formed(const TestScenario& s, const FFG& ffg, const AppSpec& spec) {
    if (s.guidance.empty()) return false;
    bool object_ok = ffg.has_functionality(s.object) || ffg.flows.contains(s.object);
    if (!object_ok) return false;
    auto has_trace = [&](const std::string& f, const std::string& t) {
        return ffg.has_functionality(f) && ffg.functionality(f).trace(t) != nullptr;
    };
    auto steps_ok = [&](const std::vector<ActionStep>& steps) {
        for (const auto& a : steps) {
            if (!spec.page(a.page)) return false;
            if (a.action != ActionKind::Back && !spec.widget(a.page, a.widget)) return false;
        }
        return true;
    };
    for (const auto& p : s.guidance) {
        bool ok = std::visit(
            [&](const auto& st) -> bool {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, NavigateTo>) {
                    return st.is_page ? spec.page(st.target) != nullptr : ffg.has_functionality(st.target);
                } else if constexpr (std::is_same_v<T, ExecuteTrace>) {
                    return has_trace(st.func, st.trace);
                } else if constexpr (std::is_same_v<T, ExecuteActions>) {
                    return steps_ok(st.actions) && (st.home_func.empty() || ffg.has_functionality(st.home_func));
                } else if constexpr (std::is_same_v<T, EstablishCondition>) {
                    try {
                        validate_condition(st.phi, spec.var_decls);
                        return true;
                    } catch (const ConditionError&) {
                        return false;
                    }
                } else if constexpr (std::is_same_v<T, ApplyVariant>) {
                    return has_trace(st.func, st.trace) && steps_ok(st.variant) && !st.variant.empty();
                } else {
                    auto it = st.params.find("flow");
                    return it == st.params.end() || ffg.flows.contains(it->second);
                }
            },
            p);
        if (!ok) return false;
    }
    return true;
}

}  // namespace ffg
