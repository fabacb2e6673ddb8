#include "ffg/executor.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <queue>
#include <random>

namespace ffg {

std::string make_dedup_key(const std::string& kind, const std::string& essence, const std::string& page) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;  // field separator
        h *= 1099511628211ull;
    };
    mix(kind);
    mix(essence);
    mix(page);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json to_json(const BugReport& r) {
    return {{"id", r.id},
            {"kind", r.kind},
            {"scenario", r.scenario},
            {"violation_kind", r.violation_kind},
            {"violation", r.violation},
            {"page", r.page},
            {"state_snapshot", to_json(r.state_snapshot)},
            {"dedup_key", r.dedup_key},
            {"step_index", r.step_index},
            {"trace", to_json(r.trace)}};
}

std::vector<ActionStep> candidate_actions(const SimulatorSession& s, const std::string& page) {
    std::vector<ActionStep> out;
    const Page* p = s.spec().page(page);
    if (!p) return out;
    for (const auto& w : p->widgets) {
        if (!s.widget_visible(page, w) || !s.widget_enabled(page, w)) continue;
        switch (w.kind) {
            case WidgetKind::Input:
                for (const auto& v : w.values) out.push_back({page, w.id, ActionKind::Input, v});
                break;
            case WidgetKind::Toggle:
            case WidgetKind::Checkbox:
                out.push_back({page, w.id, ActionKind::ToggleOn, ""});
                out.push_back({page, w.id, ActionKind::ToggleOff, ""});
                break;
            default:
                out.push_back({page, w.id, ActionKind::Click, ""});
        }
    }
    return out;
}

namespace {

std::string state_key(const SimulatorSession& s) {
    std::string k = s.current_page() + "|";
    for (const auto& [var, v] : s.valuation()) k += var + "=" + render_value(v) + ";";
    return k;
}

int kind_rank(WidgetKind k) {
    switch (k) {
        case WidgetKind::Input: return 0;
        case WidgetKind::Toggle:
        case WidgetKind::Checkbox: return 1;
        case WidgetKind::Button: return 2;
        case WidgetKind::ListItem: return 3;
        case WidgetKind::Icon: return 4;
    }
    return 5;
}

// Heuristic distance: fewest unsatisfied literals over the clauses.
std::size_t distance_to(const Condition& phi, const Valuation& v) {
    std::size_t best = SIZE_MAX;
    for (const auto& c : phi.clauses()) {
        std::size_t miss = 0;
        for (const auto& a : c.literals) miss += evaluate(a, v) ? 0 : 1;
        best = std::min(best, miss);
    }
    return best;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& salt) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
    for (unsigned char c : salt) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

ScenarioExecutor::ScenarioExecutor(const FFG& ffg, const AppSpec& spec, const SemanticOracle& oracle,
                                   ExecutorConfig cfg)
    : ffg_(ffg), spec_(spec), oracle_(oracle), cfg_(cfg) {
    for (const auto& [id, f] : ffg_.functionalities) {
        for (const auto& t : f.traces) known_moves_.insert(t.steps.begin(), t.steps.end());
    }
}

std::set<std::string> ScenarioExecutor::target_pages(const std::string& func) const {
    std::set<std::string> out;
    if (!ffg_.has_functionality(func)) return out;
    for (const auto& t : ffg_.functionality(func).traces) out.insert(t.steps.front().page);
    return out;
}

std::optional<std::vector<ActionStep>> ScenarioExecutor::plan_navigation(const SimulatorSession& from,
                                                                         const std::set<std::string>& targets) const {
    if (targets.contains(from.current_page())) return std::vector<ActionStep>{};
    if (from.crashed()) return std::nullopt;
    constexpr std::size_t kNodeCap = 4000;

    // First pass keeps the state untouched; the fallback admits moves that
    // change state as long as they perform no abstract operation.
    for (int pass = 0; pass < 2; ++pass) {
        struct Node {
            SimulatorSession s;
            std::vector<ActionStep> path;
        };
        std::deque<Node> queue;
        std::set<std::string> seen{state_key(from)};
        queue.push_back({from.clone(), {}});
        std::size_t expanded = 0;
        while (!queue.empty() && expanded < kNodeCap) {
            Node node = std::move(queue.front());
            queue.pop_front();
            ++expanded;
            if (static_cast<int>(node.path.size()) >= cfg_.nav_depth) continue;
            auto moves = candidate_actions(node.s, node.s.current_page());
            std::stable_partition(moves.begin(), moves.end(),
                                  [&](const ActionStep& m) { return known_moves_.contains(m); });
            moves.push_back(ActionStep::back(node.s.current_page()));
            for (const auto& m : moves) {
                SimulatorSession next = node.s.clone();
                StepOutcome o = next.perform(m);
                if (!o.ok()) continue;
                if (pass == 0 && o.state_after != o.state_before) continue;
                if (pass == 1 && o.abstract_op) continue;
                auto path = node.path;
                path.push_back(m);
                if (targets.contains(next.current_page())) return path;
                if (!seen.insert(state_key(next)).second) continue;
                queue.push_back({std::move(next), std::move(path)});
            }
        }
    }
    return std::nullopt;
}

std::optional<std::vector<ActionStep>> ScenarioExecutor::plan_establish(const SimulatorSession& from,
                                                                        const Condition& phi) const {
    if (evaluate(phi, from.valuation())) return std::vector<ActionStep>{};
    if (!is_satisfiable(phi, spec_.var_decls)) return std::nullopt;

    // Known traces, those touching phi's variables first.
    struct Ref {
        const Trace* trace;
        bool touches;
    };
    std::vector<Ref> refs;
    auto vars = phi.variables();
    for (const auto& [id, f] : ffg_.functionalities) {
        for (const auto& t : f.traces) {
            bool touches = false;
            for (const auto& s : t.steps) {
                const Page* p = spec_.page(s.page);
                if (!p) continue;
                for (const auto& v : vars) touches = touches || p->touched_vars.contains(v);
            }
            refs.push_back({&t, touches});
        }
    }
    std::stable_partition(refs.begin(), refs.end(), [](const Ref& r) { return r.touches; });

    struct Node {
        std::size_t h;
        int depth;
        std::size_t seq;
        SimulatorSession s;
        std::vector<ActionStep> path;
    };
    auto worse = [](const Node& a, const Node& b) {
        return std::tie(a.h, a.depth, a.seq) > std::tie(b.h, b.depth, b.seq);
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
    std::size_t seq = 0;
    open.push({distance_to(phi, from.valuation()), 0, seq++, from.clone(), {}});
    std::size_t expansions = 0;
    std::set<std::string> seen{state_key(from)};
    while (!open.empty() && expansions < 64) {
        Node node = open.top();
        open.pop();
        ++expansions;
        if (node.depth >= cfg_.establish_depth) continue;
        for (const auto& r : refs) {
            auto nav = plan_navigation(node.s, {r.trace->steps.front().page});
            if (!nav) continue;
            SimulatorSession next = node.s.clone();
            auto path = node.path;
            bool ok = true;
            for (const auto& m : *nav) {
                ok = ok && next.perform(m).ok();
                path.push_back(m);
            }
            for (const auto& m : r.trace->steps) {
                if (!ok) break;
                ok = next.perform(m).ok();
                path.push_back(m);
            }
            if (!ok) continue;
            if (evaluate(phi, next.valuation())) return path;
            if (!seen.insert(state_key(next)).second) continue;
            open.push({distance_to(phi, next.valuation()), node.depth + 1, seq++, std::move(next), std::move(path)});
        }
    }
    return std::nullopt;
}

std::optional<ActionStep> ScenarioExecutor::plan_recovery(const SimulatorSession& at, const ActionStep& failed,
                                                          const StepOutcome& outcome) const {
    if (at.crashed()) return std::nullopt;
    std::set<std::string> blocking;
    switch (outcome.status) {
        case StepStatus::WidgetMissing:
            if (at.current_page() != failed.page) return std::nullopt;  // caller re-navigates
            blocking.insert(visibility_var(failed.page, failed.widget));
            break;
        case StepStatus::WidgetDisabled:
            blocking.insert(enabled_var(failed.page, failed.widget));
            break;
        case StepStatus::GuardUnmet:
            for (const auto* r : spec_.rules_for(failed.page, failed.widget, failed.action)) {
                auto v = r->guard.variables();
                blocking.insert(v.begin(), v.end());
            }
            break;
        default:
            return std::nullopt;
    }
    std::optional<ActionStep> fallback;
    for (const auto& m : candidate_actions(at, at.current_page())) {
        if (m.widget == failed.widget) continue;
        SimulatorSession probe = at.clone();
        StepOutcome o = probe.perform(m);
        if (!o.ok() || probe.current_page() != at.current_page()) continue;
        bool changes = std::any_of(blocking.begin(), blocking.end(), [&](const std::string& v) {
            auto a = o.state_before.find(v);
            auto b = o.state_after.find(v);
            return a != o.state_before.end() && b != o.state_after.end() && a->second != b->second;
        });
        if (!changes) continue;
        if (probe.perform(failed).ok()) return m;
        if (!fallback) fallback = m;
    }
    if (fallback) return fallback;
    if (outcome.status == StepStatus::WidgetMissing) return ActionStep::back(at.current_page());
    return std::nullopt;
}

std::vector<BugReport> ScenarioExecutor::detect(const ExecStep& es, const std::string& scenario_id) const {
    std::vector<BugReport> out;
    const StepOutcome& o = es.outcome;
    auto base = [&](std::string kind, std::string vk, json violation, const std::string& essence) {
        BugReport r;
        r.kind = std::move(kind);
        r.scenario = scenario_id;
        r.violation_kind = std::move(vk);
        r.violation = std::move(violation);
        r.page = o.page_before;
        r.state_snapshot = o.state_after;
        r.dedup_key = make_dedup_key(r.kind, essence, r.page);
        return r;
    };
    for (const auto& e : o.events) {
        if (e.kind == Event::Crash) {
            out.push_back(base("crash", "crash_signal", {{"crash_signal", e.text}, {"step", es.step.render()}},
                               "crash|" + e.text + "|" + es.step.render()));
        }
    }
    if (o.status == StepStatus::Ok && o.abstract_op) {
        if (const ExpectedEffect* eff = spec_.expected_effect(o.abstract_op->tag)) {
            Condition post = eff->instantiate(o.abstract_op->args);
            if (!evaluate(post, o.state_after)) {
                json toasts = json::array();
                for (const auto& e : o.events) {
                    if (e.kind == Event::Toast) toasts.push_back(e.text);
                }
                json v = {{"op", o.abstract_op->render()},
                          {"postcondition", post.render()},
                          {"description", eff->description},
                          {"observed_toasts", toasts},
                          {"observed_state", to_json(o.state_after)}};
                out.push_back(base("functional", "expected_effect", std::move(v),
                                   "expected_effect|" + o.abstract_op->render() + "|" + post.render()));
            }
        }
    }
    for (const auto& e : o.events) {
        if (e.kind != Event::Toast) continue;
        if (std::find(spec_.anomalous_toasts.begin(), spec_.anomalous_toasts.end(), e.text) ==
            spec_.anomalous_toasts.end()) {
            continue;
        }
        out.push_back(base("functional", "toast_anomaly", {{"toast_anomaly", e.text}, {"step", es.step.render()}},
                           "toast|" + e.text));
    }
    return out;
}

// ---------------------------------------------------------------------------

class ScenarioRun {
public:
    ScenarioRun(const ScenarioExecutor& ex, SimulatorSession& s, std::string scenario_id, std::size_t budget)
        : ex_(ex), s_(s), id_(std::move(scenario_id)), budget_(budget),
          rng_(mix_seed(s.seed(), id_)) {}

    struct PlanStatus {
        bool ran = false;
        bool ok = false;
        Valuation before;
        std::string failed_step;
        std::string failed_page;
    };

    ScenarioResult result;
    std::vector<PlanStatus> status;
    bool dead = false;

    void note(const std::string& msg) { result.trace.diagnostics.push_back(msg); }

    bool out_of_budget() const { return used_ >= budget_; }

    std::optional<StepOutcome> step(const ActionStep& a, StepOrigin origin) {
        if (s_.crashed()) return std::nullopt;
        if (out_of_budget()) {
            result.trace.budget_exhausted = true;
            return std::nullopt;
        }
        ++used_;
        ExecStep es{a, s_.perform(a), plan_index_, origin, false};
        auto reports = ex_.detect(es, id_);
        es.flagged = !reports.empty();
        result.trace.steps.push_back(es);
        for (auto& r : reports) {
            r.step_index = result.trace.steps.size() - 1;
            r.trace = result.trace;
            result.reports.push_back(std::move(r));
        }
        return es.outcome;
    }

    bool replay(const std::vector<ActionStep>& path, StepOrigin origin) {
        for (const auto& m : path) {
            auto o = step(m, origin);
            if (!o || !o->ok()) return false;
        }
        return true;
    }

    bool navigate(const std::set<std::string>& targets) {
        if (targets.empty()) return false;
        auto path = ex_.plan_navigation(s_, targets);
        if (!path) {
            note("navigation failed toward " + *targets.begin());
            return false;
        }
        return replay(*path, StepOrigin::Navigation);
    }

    // Performs one plan action with the bounded recovery policy.
    bool act(const ActionStep& a, StepOrigin origin, bool allow_recovery = true) {
        for (int attempt = 0;; ++attempt) {
            auto o = step(a, origin);
            if (!o) return false;
            if (o->ok()) return true;
            if (o->status == StepStatus::Crashed || !allow_recovery || attempt >= ex_.cfg_.max_recoveries) {
                status_fail(a);
                return false;
            }
            if (o->status == StepStatus::WidgetMissing && s_.current_page() != a.page) {
                if (!navigate({a.page})) {
                    status_fail(a);
                    return false;
                }
                continue;
            }
            auto rec = ex_.plan_recovery(s_, a, *o);
            if (!rec) {
                note("no recovery for " + a.render() + " (" + std::string(step_status_name(o->status)) + ")");
                status_fail(a);
                return false;
            }
            auto ro = step(*rec, StepOrigin::Recovery);
            if (!ro) return false;
            if (rec->action == ActionKind::Back && !navigate({a.page})) {
                status_fail(a);
                return false;
            }
        }
    }

    void status_fail(const ActionStep& a) {
        if (plan_index_ >= 0 && static_cast<std::size_t>(plan_index_) < status.size()) {
            status[plan_index_].failed_step = a.render();
            status[plan_index_].failed_page = a.page;
        }
    }

    bool run_trace(const std::string& func, const std::string& tid) {
        const Trace& t = ex_.ffg_.trace(func, tid);
        if (!navigate({t.steps.front().page})) return false;
        for (const auto& a : t.steps) {
            if (!act(a, StepOrigin::Plan)) return false;
        }
        return true;
    }

    void explore(const std::set<std::string>& home_pages) {
        std::set<std::pair<std::string, std::string>> tried;
        for (std::size_t n = 0; n < ex_.cfg_.explore_burst && !s_.crashed(); ++n) {
            auto cands = candidate_actions(s_, s_.current_page());
            // One action per widget: the first declared value or toggle state.
            std::vector<ActionStep> uniq;
            for (const auto& c : cands) {
                bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const ActionStep& u) { return u.widget == c.widget; });
                if (!dup) uniq.push_back(c);
            }
            if (uniq.empty()) break;
            std::vector<std::tuple<int, int, int, std::uint64_t, std::size_t>> ranked;
            for (std::size_t i = 0; i < uniq.size(); ++i) {
                const Widget* w = ex_.spec_.widget(uniq[i].page, uniq[i].widget);
                int was_tried = tried.contains({uniq[i].page, uniq[i].widget}) ? 1 : 0;
                int known = ex_.known_moves_.contains(uniq[i]) ? 1 : 0;
                ranked.emplace_back(was_tried, known, kind_rank(w->kind), rng_(), i);
            }
            std::sort(ranked.begin(), ranked.end());
            if (std::get<0>(ranked.front()) == 1) break;  // everything here already tried
            const ActionStep& pick = uniq[std::get<4>(ranked.front())];
            tried.insert({pick.page, pick.widget});
            auto o = step(pick, StepOrigin::Exploration);
            if (!o) break;
            if (o->ok() && home_pages.contains(s_.current_page())) break;
        }
    }

    void run_plan(const TestScenario& sc) {
        status.assign(sc.guidance.size(), {});
        for (std::size_t i = 0; i < sc.guidance.size(); ++i) {
            plan_index_ = static_cast<int>(i);
            const PlanStep& p = sc.guidance[i];
            if (const auto* obs = std::get_if<Observe>(&p)) {
                observe(*obs);
                continue;
            }
            if (dead || s_.crashed() || out_of_budget()) {
                if (out_of_budget()) result.trace.budget_exhausted = true;
                continue;
            }
            status[i].ran = true;
            status[i].before = s_.valuation();
            bool ok = std::visit([&](const auto& st) { return exec(st); }, p);
            status[i].ok = ok;
            if (!ok) {
                dead = true;
                note("plan step " + std::to_string(i) + " failed: " + render_plan_step(p));
            }
        }
        result.completed = !dead && !s_.crashed();
    }

    bool exec(const NavigateTo& st) {
        if (st.is_page) return navigate({st.target});
        return navigate(ex_.target_pages(st.target));
    }
    bool exec(const ExecuteTrace& st) { return run_trace(st.func, st.trace); }
    bool exec(const ExecuteActions& st) {
        std::set<std::string> home;
        if (!st.home_func.empty() && ex_.ffg_.has_functionality(st.home_func)) {
            auto pages = functionality_pages(ex_.ffg_.functionality(st.home_func));
            home.insert(pages.begin(), pages.end());
        }
        bool any = false;
        for (const auto& a : st.actions) {
            if (s_.crashed() || out_of_budget()) break;
            if (!navigate({a.page})) continue;
            if (!act(a, StepOrigin::Plan)) continue;
            any = true;
            if (st.explore_after) explore(home);
        }
        return any || st.actions.empty();
    }
    bool exec(const EstablishCondition& st) {
        auto path = ex_.plan_establish(s_, st.phi);
        if (!path) {
            note("condition unreachable: " + st.phi.render());
            return false;
        }
        return replay(*path, StepOrigin::Navigation);
    }
    bool exec(const ApplyVariant& st) {
        if (st.variant.empty() || !navigate({st.variant.front().page})) return false;
        for (const auto& a : st.variant) {
            if (!act(a, StepOrigin::Plan, false)) return false;
        }
        return true;
    }
    bool exec(const Observe&) { return true; }

    std::size_t param_index(const Observe& o, const char* key) const {
        auto it = o.params.find(key);
        if (it == o.params.end()) return SIZE_MAX;
        return static_cast<std::size_t>(std::stoul(it->second));
    }

    void observe(const Observe& o) {
        if (o.check == "mr_conservation") {
            auto vi = param_index(o, "variant");
            auto ti = param_index(o, "target");
            if (vi >= status.size() || ti >= status.size()) return;
            if (!status[vi].ran || !status[vi].ok || !status[ti].ran || status[ti].ok) return;
            if (status[ti].failed_step.empty()) return;  // budget or navigation, not the flow itself
            std::string mr = o.params.count("mr") ? o.params.at("mr") : "";
            std::string flow = o.params.count("flow") ? o.params.at("flow") : "";
            add_mr_report(mr, flow, status[ti], "target trace not executable after a successful variant");
        } else if (o.check == "divergence") {
            auto first = param_index(o, "first");
            auto second = param_index(o, "second");
            if (first >= status.size() || second >= status.size()) return;
            if (!status[first].ran || !status[first].ok || !status[second].ran || status[second].ok) return;
            if (status[second].failed_step.empty()) return;
            auto fit = o.params.find("flow");
            if (fit == o.params.end() || !ex_.ffg_.flows.contains(fit->second)) return;
            const Flow& f = ex_.ffg_.flows.at(fit->second);
            // A bare True condition is still being learned; divergence refines it instead.
            if (f.phi.is_true() || !evaluate(f.phi, status[second].before)) return;
            add_mr_report("invariant", f.id, status[second], "re-execution diverged while the flow condition held");
        }
    }

    void add_mr_report(const std::string& mr, const std::string& flow, const PlanStatus& st, const std::string& what) {
        BugReport r;
        r.kind = "functional";
        r.scenario = id_;
        r.violation_kind = "mr_violation";
        r.violation = {{"mr", mr}, {"flow", flow}, {"expectation", what}, {"failed_step", st.failed_step}};
        r.page = st.failed_page;
        r.state_snapshot = s_.valuation();
        r.dedup_key = make_dedup_key(r.kind, "mr|" + mr + "|" + st.failed_step, r.page);
        r.step_index = result.trace.steps.empty() ? 0 : result.trace.steps.size() - 1;
        r.trace = result.trace;
        // Attribute the report to the last plan step of the failing block.
        for (auto it = result.trace.steps.rbegin(); it != result.trace.steps.rend(); ++it) {
            if (it->step.render() == st.failed_step) {
                it->flagged = true;
                break;
            }
        }
        result.reports.push_back(std::move(r));
    }

    std::size_t used() const { return used_; }

private:
    const ScenarioExecutor& ex_;
    SimulatorSession& s_;
    std::string id_;
    std::size_t budget_;
    std::size_t used_ = 0;
    int plan_index_ = -1;
    std::mt19937_64 rng_;
};

ScenarioResult ScenarioExecutor::execute(const TestScenario& s, SimulatorSession& session, std::size_t budget) const {
    ScenarioRun run(*this, session, s.id, budget);
    run.result.scenario_id = s.id;
    if (!well_formed(s, ffg_, spec_)) {
        run.note("scenario references unknown ids; aborted");
        return std::move(run.result);
    }
    run.run_plan(s);
    run.result.actions = run.used();
    return std::move(run.result);
}

ExecutionTrace ScenarioExecutor::navigate_to(SimulatorSession& session, const std::string& target, bool is_page,
                                             std::size_t budget, bool* reached) const {
    ScenarioRun run(*this, session, "navigate", budget);
    bool ok = run.navigate(is_page ? std::set<std::string>{target} : target_pages(target));
    if (reached) *reached = ok;
    return std::move(run.result.trace);
}

ExecutionTrace ScenarioExecutor::establish_condition(SimulatorSession& session, const Condition& phi,
                                                     std::size_t budget, bool* reached) const {
    if (!is_satisfiable(phi, spec_.var_decls)) throw ConditionError("cannot establish an unsatisfiable condition");
    ScenarioRun run(*this, session, "establish", budget);
    bool ok = run.exec(EstablishCondition{phi});
    if (reached) *reached = ok;
    return std::move(run.result.trace);
}

}  // namespace ffg
