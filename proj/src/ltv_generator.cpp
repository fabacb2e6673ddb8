#include "ffg/ltv_generator.hpp"

#include "ffg/executor.hpp"

namespace ffg {

std::string scenario_tag(const std::string& strategy, const std::string& object, std::size_t n) {
    auto slash = strategy.find('/');
    std::string name = slash == std::string::npos ? strategy : strategy.substr(slash + 1);
    return name + ":" + object + ":" + std::to_string(n);
}

namespace {

TestScenario make(const char* strategy, const std::string& object, std::size_t n, std::vector<PlanStep> plan) {
    TestScenario s;
    s.strategy = strategy;
    s.type = std::string(strategy).starts_with("ltv/") ? ScenarioType::LTV : ScenarioType::STV;
    s.object = object;
    s.id = scenario_tag(strategy, object, n);
    s.guidance = std::move(plan);
    return s;
}

// Replays a path on a clone; false when any step is not ok.
bool replay_ok(SimulatorSession& s, const std::vector<ActionStep>& steps) {
    for (const auto& a : steps) {
        if (!s.perform(a).ok()) return false;
    }
    return true;
}

}  // namespace

std::vector<TestScenario> gen_completeness(const FFG& ffg, const AppSpec& spec, const SemanticOracle& oracle) {
    std::vector<TestScenario> out;
    for (const auto& [id, f] : ffg.functionalities) {
        auto missing = oracle.essential_actions(f, spec);
        if (missing.empty()) continue;
        std::vector<PlanStep> plan;
        for (const auto& t : f.traces) plan.push_back(ExecuteTrace{id, t.id});
        plan.push_back(ExecuteActions{std::move(missing), true, id});
        plan.push_back(Observe{"goal_progress", {{"func", id}}});
        out.push_back(make(strategy::kCompleteness, id, 1, std::move(plan)));
    }
    return out;
}

std::vector<TestScenario> gen_independence(const FFG& ffg, const SemanticOracle& oracle, double sep_threshold,
                                           double intra_threshold) {
    std::vector<TestScenario> out;
    for (const auto& [id, f] : ffg.functionalities) {
        if (f.traces.size() < 2) continue;
        std::vector<std::pair<std::string, GoalDescriptor>> goals;
        for (const auto& t : f.traces) goals.emplace_back(t.id, t.goal);
        ClusterResult cr = oracle.cluster_trace_goals(goals, intra_threshold);
        if (cr.clusters.size() < 2 || cr.separation < sep_threshold) continue;
        for (std::size_t c = 0; c < cr.clusters.size(); ++c) {
            std::vector<PlanStep> plan;
            for (const auto& tid : cr.clusters[c]) plan.push_back(ExecuteTrace{id, tid});
            plan.push_back(Observe{"goal_progress", {{"func", id}, {"cluster", std::to_string(c)}}});
            out.push_back(make(strategy::kIndependence, id, c + 1, std::move(plan)));
        }
    }
    return out;
}

std::vector<TestScenario> gen_condition_partition(const Flow& flow, const FFG& ffg, const AppSpec& spec) {
    std::vector<TestScenario> out;
    auto parts = partition_disjuncts(flow.phi);
    if (parts.size() < 2) return out;
    ffg.trace(flow.source, flow.pi);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!is_satisfiable(parts[i], spec.var_decls)) continue;
        out.push_back(make(strategy::kPartition, flow.id, i + 1,
                           {NavigateTo{flow.source, false}, ExecuteTrace{flow.source, flow.pi},
                            EstablishCondition{parts[i]}, ExecuteTrace{flow.target, flow.pi_prime},
                            Observe{"flow_outcome", {{"flow", flow.id}, {"disjunct", std::to_string(i)}}}}));
    }
    return out;
}

std::vector<TestScenario> gen_minimal_violation(const Flow& flow, const FFG& ffg, const AppSpec& spec,
                                                std::vector<std::string>* notes) {
    std::vector<TestScenario> out;
    if (flow.phi.is_true() || flow.phi.is_false()) return out;
    ffg.trace(flow.source, flow.pi);
    std::size_t n = 0;
    for (const auto& clause : flow.phi.clauses()) {
        for (const auto& vt : minimal_violation_targets(clause)) {
            if (!is_satisfiable(vt.condition, spec.var_decls)) {
                if (notes) notes->push_back(flow.id + ": violating " + vt.literal.render() + " is unsatisfiable, skipped");
                continue;
            }
            out.push_back(make(strategy::kMinimalViolation, flow.id, ++n,
                               {EstablishCondition{vt.condition}, ExecuteTrace{flow.source, flow.pi},
                                ExecuteTrace{flow.target, flow.pi_prime},
                                Observe{"flow_outcome", {{"flow", flow.id}, {"violated", vt.literal.render()}}}}));
        }
    }
    return out;
}

std::vector<TestScenario> gen_condition_invariant(const Flow& flow, const FFG& ffg, const SimulatorSession& base,
                                                  std::size_t max_alpha) {
    std::vector<TestScenario> out;
    const AppSpec& spec = base.spec();
    const Trace& pi = ffg.trace(flow.source, flow.pi);
    const Trace& pi_prime = ffg.trace(flow.target, flow.pi_prime);
    SpecOracle oracle;
    ScenarioExecutor ex(ffg, spec, oracle);

    // pi . pi' must run cleanly from a fresh session.
    SimulatorSession s = base.clone();
    auto nav = ex.plan_navigation(s, {pi.steps.front().page});
    if (!nav || !replay_ok(s, *nav) || !replay_ok(s, pi.steps)) return out;
    auto nav2 = ex.plan_navigation(s, {pi_prime.steps.front().page});
    if (!nav2 || !replay_ok(s, *nav2) || !replay_ok(s, pi_prime.steps)) return out;

    const std::string start = pi.steps.front().page;
    std::vector<std::vector<PlanStep>> alphas;
    alphas.push_back({NavigateTo{start, true}});
    for (const auto& t : ffg.functionality(flow.target).traces) {
        if (t.id != flow.pi_prime) alphas.push_back({ExecuteTrace{flow.target, t.id}, NavigateTo{start, true}});
    }

    std::size_t n = 0;
    for (const auto& alpha : alphas) {
        if (n >= max_alpha) break;
        SimulatorSession probe = s.clone();
        bool ok = true;
        for (const auto& p : alpha) {
            if (!ok) break;
            if (const auto* et = std::get_if<ExecuteTrace>(&p)) {
                const Trace& t = ffg.trace(et->func, et->trace);
                auto path = ex.plan_navigation(probe, {t.steps.front().page});
                ok = path && replay_ok(probe, *path) && replay_ok(probe, t.steps);
            } else if (const auto* nt = std::get_if<NavigateTo>(&p)) {
                auto path = ex.plan_navigation(probe, {nt->target});
                ok = path && replay_ok(probe, *path);
            }
        }
        if (!ok || probe.current_page() != start) continue;
        if (!evaluate(flow.phi, probe.valuation())) continue;  // alpha must keep phi
        std::vector<PlanStep> plan{ExecuteTrace{flow.source, flow.pi}, ExecuteTrace{flow.target, flow.pi_prime}};
        plan.insert(plan.end(), alpha.begin(), alpha.end());
        std::size_t second = plan.size() + 1;
        plan.push_back(ExecuteTrace{flow.source, flow.pi});
        plan.push_back(ExecuteTrace{flow.target, flow.pi_prime});
        plan.push_back(Observe{"divergence", {{"first", "1"}, {"second", std::to_string(second)}, {"flow", flow.id}}});
        out.push_back(make(strategy::kInvariant, flow.id, ++n, std::move(plan)));
    }
    return out;
}

}  // namespace ffg
