#include "ffg/updater.hpp"

#include <algorithm>

namespace ffg {

std::string_view update_kind_name(UpdateKind k) {
    switch (k) {
        case UpdateKind::NodeCreate: return "node_create";
        case UpdateKind::NodeMerge: return "node_merge";
        case UpdateKind::NodeSplit: return "node_split";
        case UpdateKind::FlowCreate: return "flow_create";
        case UpdateKind::FlowStrengthen: return "flow_strengthen";
        case UpdateKind::FlowWeaken: return "flow_weaken";
        case UpdateKind::FlowMerge: return "flow_merge";
    }
    return "?";
}

json to_json(const UpdateOp& op) {
    return {{"kind", std::string(update_kind_name(op.kind))},
            {"before", op.before},
            {"after", op.after},
            {"justification", op.justification}};
}

namespace {

std::set<std::string> vars_of(const std::vector<Trace>& traces, const AppSpec& spec) {
    std::set<std::string> out;
    for (const auto& t : traces) {
        for (const auto& s : t.steps) {
            if (const Page* p = spec.page(s.page)) out.insert(p->touched_vars.begin(), p->touched_vars.end());
        }
    }
    return out;
}

GoalDescriptor goal_of(const std::vector<Trace>& traces, const std::string& label) {
    std::vector<GoalDescriptor> goals;
    for (const auto& t : traces) goals.push_back(t.goal);
    GoalDescriptor g = mean_goal(goals);
    if (!label.empty()) g.label = label;
    return g;
}

// Splits `func` when its trace goals form well separated clusters. The
// cluster holding the node's first trace keeps the node.
std::optional<UpdateOp> maybe_split(FFG& ffg, const std::string& func, const AppSpec& spec,
                                    const SemanticOracle& oracle, const UpdateThresholds& th,
                                    std::vector<HomedSegment>& homed) {
    const Functionality& f = ffg.functionality(func);
    if (f.traces.size() < 2) return std::nullopt;
    std::vector<std::pair<std::string, GoalDescriptor>> goals;
    for (const auto& t : f.traces) goals.emplace_back(t.id, t.goal);
    ClusterResult cr = oracle.cluster_trace_goals(goals, th.intra);
    if (cr.clusters.size() < 2 || cr.separation < th.sep) return std::nullopt;

    const std::string first = f.traces.front().id;
    UpdateOp op{UpdateKind::NodeSplit, {func}, {func}, {{"clusters", cr.clusters}, {"separation", cr.separation}}};
    std::map<std::string, std::pair<std::string, std::string>> moved;  // old trace id -> (node, new id)
    for (const auto& cluster : cr.clusters) {
        if (std::find(cluster.begin(), cluster.end(), first) != cluster.end()) continue;
        std::vector<Trace> part;
        for (const auto& tid : cluster) part.push_back(*ffg.functionality(func).trace(tid));
        std::string nid = ffg.add_functionality(goal_of(part, ""));
        for (auto& t : part) moved[t.id] = {nid, ffg.add_trace(nid, t.steps, t.goal)};
        ffg.functionality_mut(nid).vars = vars_of(ffg.functionality(nid).traces, spec);
        op.after.push_back(nid);
    }
    auto& node = ffg.functionality_mut(func);
    std::erase_if(node.traces, [&](const Trace& t) { return moved.contains(t.id); });
    node.vars = vars_of(node.traces, spec);
    node.goal = goal_of(node.traces, node.goal.label);
    for (auto& [id, e] : ffg.flows) {
        if (e.source == func && moved.contains(e.pi)) std::tie(e.source, e.pi) = moved.at(e.pi);
        if (e.target == func && moved.contains(e.pi_prime)) std::tie(e.target, e.pi_prime) = moved.at(e.pi_prime);
    }
    for (auto& h : homed) {
        if (h.home.func == func && moved.contains(h.home.trace)) {
            std::tie(h.home.func, h.home.trace) = moved.at(h.home.trace);
        }
    }
    ffg.touch();
    ffg.check_integrity();
    return op;
}

}  // namespace

std::vector<UpdateOp> update_functionalities(FFG& ffg, ExecutionTrace& exec, const AppSpec& spec,
                                             const SemanticOracle& oracle, const UpdateThresholds& th,
                                             std::vector<HomedSegment>* homed_out) {
    std::vector<UpdateOp> ops;
    std::vector<HomedSegment> homed;
    exec.segment_labels.assign(exec.steps.size(), "");
    std::set<std::string> grown;  // nodes to re-cluster
    for (auto& seg : segment_trace(exec, spec, oracle, th.sim)) {
        HomeResult h = home_segment(ffg, seg, oracle, th.sim);
        if (h.created_node) {
            ops.push_back({UpdateKind::NodeCreate, {}, {h.func, h.trace}, {{"similarity", h.similarity}}});
        } else {
            ops.push_back({UpdateKind::NodeMerge,
                           {h.func},
                           {h.func, h.trace},
                           {{"similarity", h.similarity}, {"new_trace", h.added_trace}}});
            grown.insert(h.func);
        }
        homed.push_back({std::move(seg), std::move(h)});
    }
    for (const auto& func : grown) {
        if (!ffg.has_functionality(func)) continue;
        if (auto op = maybe_split(ffg, func, spec, oracle, th, homed)) ops.push_back(std::move(*op));
    }
    for (const auto& h : homed) {
        for (auto i : h.segment.indices) exec.segment_labels[i] = h.home.func;
    }
    if (homed_out) *homed_out = std::move(homed);
    return ops;
}

std::vector<Flow> derive_flow(const ExecutionTrace& exec, const std::vector<HomedSegment>& homed, const FFG& ffg,
                              const SemanticOracle& oracle, const AppSpec& spec) {
    std::vector<Flow> out;
    for (std::size_t k = 0; k + 1 < homed.size(); ++k) {
        const auto& a = homed[k];
        const auto& b = homed[k + 1];
        if (a.home.func == b.home.func || !contiguous(exec, a.segment, b.segment)) continue;
        const Valuation& boundary = exec.steps[b.segment.indices.front()].outcome.state_before;
        Flow e;
        e.source = a.home.func;
        e.pi = a.home.trace;
        e.target = b.home.func;
        e.pi_prime = b.home.trace;
        e.phi = oracle.infer_flow_condition(boundary, ffg.functionality(b.home.func), spec);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<UpdateOp> update_flows(FFG& ffg, const Flow& cand, std::span<const VarDecl> decls) {
    std::vector<UpdateOp> ops;
    Condition phi = cand.phi;
    auto siblings = flows_from(ffg, cand.source, cand.pi);
    auto same_target = [&](const Flow& s) { return s.target == cand.target && s.pi_prime == cand.pi_prime; };

    // Divergent siblings first, so the same-target check sees the final condition.
    for (const auto& s : siblings) {
        if (same_target(s)) continue;
        bool fwd = entails(cand.phi, s.phi, decls);
        bool bwd = entails(s.phi, cand.phi, decls);
        if (fwd && bwd) continue;  // equivalent: both outcomes stay possible
        if (fwd) {
            Condition narrowed = conjoin_negation(s.phi, cand.phi);
            bool dead = !is_satisfiable(narrowed, decls);
            UpdateOp op{UpdateKind::FlowStrengthen,
                        {s.id},
                        {},
                        {{"verdict", "new entails current"}, {"old", s.phi.render()}, {"new", narrowed.render()},
                         {"deleted", dead}, {"cause", cand.phi.render()}}};
            if (dead) {
                ffg.remove_flow(s.id);
            } else {
                ffg.set_phi(s.id, narrowed);
                op.after.push_back(s.id);
            }
            ops.push_back(std::move(op));
        } else if (bwd) {
            phi = conjoin_negation(phi, s.phi);
        }
    }
    if (!is_satisfiable(phi, decls)) return ops;

    for (const auto& s : siblings) {
        if (!same_target(s) || !ffg.flows.contains(s.id)) continue;
        if (entails(phi, s.phi, decls)) return ops;  // already covered
        if (entails(s.phi, phi, decls)) {
            ops.push_back({UpdateKind::FlowWeaken,
                           {s.id},
                           {s.id},
                           {{"verdict", "current entails new"}, {"old", s.phi.render()}, {"new", phi.render()}}});
            ffg.set_phi(s.id, phi);
        } else {
            Condition merged = disjoin(s.phi, phi);
            ops.push_back({UpdateKind::FlowMerge,
                           {s.id},
                           {s.id},
                           {{"verdict", "incomparable"}, {"old", s.phi.render()}, {"added", phi.render()},
                            {"new", merged.render()}}});
            ffg.set_phi(s.id, merged);
        }
        return ops;
    }
    std::string id = ffg.add_flow(cand.source, cand.pi, phi, cand.target, cand.pi_prime);
    ops.push_back({UpdateKind::FlowCreate,
                   {},
                   {id},
                   {{"phi", phi.render()}, {"derived", cand.phi.render()}, {"siblings", siblings.size()}}});
    return ops;
}

IterationSummary apply_iteration(FFG& ffg, std::vector<ExecutionTrace>& traces, const AppSpec& spec,
                                 const SemanticOracle& oracle, const UpdateThresholds& th) {
    IterationSummary sum;
    for (auto& exec : traces) {
        std::uint64_t before = ffg.revision;
        std::vector<HomedSegment> homed;
        auto ops = update_functionalities(ffg, exec, spec, oracle, th, &homed);
        for (const auto& cand : derive_flow(exec, homed, ffg, oracle, spec)) {
            auto fops = update_flows(ffg, cand, spec.var_decls);
            ops.insert(ops.end(), fops.begin(), fops.end());
        }
        for (const auto& op : ops) {
            bool idle = op.kind == UpdateKind::NodeMerge && !op.justification.value("new_trace", true);
            if (!idle) ++sum.mutations;
            ++sum.counts[std::string(update_kind_name(op.kind))];
        }
        if (ffg.revision != before) ffg.check_integrity();
        sum.ops.insert(sum.ops.end(), std::make_move_iterator(ops.begin()), std::make_move_iterator(ops.end()));
    }
    sum.revision = ffg.revision;
    return sum;
}

}  // namespace ffg
