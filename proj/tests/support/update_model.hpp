#pragma once

// Reference model of the flow update rule, evaluated pointwise over every
// valuation. Used by the unit tests and the acceptance gate.

#include <functional>
#include <random>
#include <sstream>

#include "ffg/updater.hpp"
#include "support/brute.hpp"

namespace testing_support {

using Pred = std::function<bool(const ffg::Valuation&)>;

inline ffg::FFG three_node_graph() {
    ffg::FFG g;
    std::vector<ffg::ActionStep> s1{{"p", "w1", ffg::ActionKind::Click, ""}};
    std::vector<ffg::ActionStep> s2{{"p", "w2", ffg::ActionKind::Click, ""}};
    for (auto [label, n] : {std::pair{"a", 2}, std::pair{"b", 2}, std::pair{"c", 1}}) {
        auto goal = ffg::GoalDescriptor::make(label, {1.0, 0.5}, {});
        auto id = g.add_functionality(goal);
        g.add_trace(id, s1, goal);
        if (n == 2) g.add_trace(id, s2, goal);
    }
    return g;
}

struct UpdateCase {
    ffg::FFG graph;
    ffg::Flow cand;
};

inline UpdateCase random_update_case(std::uint64_t seed, const std::vector<ffg::VarDecl>& decls) {
    std::mt19937_64 rng(seed);
    UpdateCase c{three_node_graph(), {}};
    const std::pair<const char*, const char*> targets[] = {{"b", "I"}, {"b", "II"}, {"c", "I"}, {"a", "II"}};
    std::vector<ffg::Condition> used;
    for (const auto& [t, tp] : targets) {
        if (rng() % 3 == 0) continue;
        auto phi = brute::random_condition(rng, decls);
        used.push_back(phi);
        c.graph.add_flow("a", "I", phi, t, tp);
    }
    // unrelated flows that must never change
    c.graph.add_flow("a", "II", brute::random_condition(rng, decls), "b", "I");
    c.graph.add_flow("b", "I", brute::random_condition(rng, decls), "c", "I");

    auto phi = brute::random_condition(rng, decls);
    if (!used.empty() && rng() % 2) {
        // bias toward entailment in either direction
        const auto& base = used[rng() % used.size()];
        auto extra = ffg::Condition::of(brute::random_atom(rng, decls));
        phi = rng() % 2 ? ffg::conjoin(base, extra) : ffg::disjoin(base, extra);
    }
    const auto& [t, tp] = targets[rng() % 4];
    c.cand = {"", "a", t, "I", phi, tp};
    return c;
}

// Empty string when the library's result agrees with the model.
inline std::string check_update_case(UpdateCase c, const std::vector<ffg::VarDecl>& decls) {
    const ffg::FFG before = c.graph;
    const auto& cand = c.cand;
    std::ostringstream err;
    try {
        ffg::update_flows(c.graph, cand, decls);
        c.graph.check_integrity();
    } catch (const std::exception& e) {
        return std::string("threw: ") + e.what();
    }
    auto holds = [](const ffg::Condition& k) -> Pred { return [k](const ffg::Valuation& v) { return brute::holds(k, v); }; };
    auto same = [&](const Pred& x, const Pred& y) {
        bool ok = true;
        brute::for_each(decls, [&](const ffg::Valuation& v) { ok = ok && x(v) == y(v); });
        return ok;
    };
    auto entails = [&](const Pred& x, const Pred& y) {
        bool ok = true;
        brute::for_each(decls, [&](const ffg::Valuation& v) { ok = ok && (!x(v) || y(v)); });
        return ok;
    };
    Pred phi = holds(cand.phi);

    std::vector<Pred> blocking;
    const ffg::Flow* same_target = nullptr;
    for (const auto& [id, s] : before.flows) {
        if (s.source != cand.source || s.pi != cand.pi) {
            if (!c.graph.flows.contains(id) || !(c.graph.flows.at(id).phi == s.phi)) err << id << " unrelated changed; ";
            continue;
        }
        if (s.target == cand.target && s.pi_prime == cand.pi_prime) {
            same_target = &s;
            continue;
        }
        Pred sp = holds(s.phi);
        bool fwd = entails(phi, sp), bwd = entails(sp, phi);
        if (fwd && !bwd) {
            Pred narrowed = [&, sp](const ffg::Valuation& v) { return sp(v) && !phi(v); };
            bool alive = false;
            brute::for_each(decls, [&](const ffg::Valuation& v) { alive = alive || narrowed(v); });
            if (!alive) {
                if (c.graph.flows.contains(id)) err << id << " should be deleted; ";
            } else if (!c.graph.flows.contains(id) || !same(holds(c.graph.flows.at(id).phi), narrowed)) {
                err << id << " not strengthened; ";
            }
        } else {
            if (bwd && !fwd) blocking.push_back(sp);
            if (!c.graph.flows.contains(id) || !(c.graph.flows.at(id).phi == s.phi)) err << id << " changed; ";
        }
    }
    Pred eff = [&](const ffg::Valuation& v) {
        if (!phi(v)) return false;
        for (const auto& b : blocking)
            if (b(v)) return false;
        return true;
    };
    bool eff_sat = false;
    brute::for_each(decls, [&](const ffg::Valuation& v) { eff_sat = eff_sat || eff(v); });

    std::vector<std::string> created;
    for (const auto& [id, e] : c.graph.flows)
        if (!before.flows.contains(id)) created.push_back(id);

    if (same_target) {
        if (!created.empty()) err << "unexpected new flow; ";
        Pred t = holds(same_target->phi);
        Pred want = t;
        if (eff_sat && !entails(eff, t)) {
            if (entails(t, eff)) want = eff;
            else want = [&, t](const ffg::Valuation& v) { return t(v) || eff(v); };
        }
        auto it = c.graph.flows.find(same_target->id);
        if (it == c.graph.flows.end()) err << "same-target flow vanished; ";
        else if (!same(holds(it->second.phi), want)) err << "same-target condition wrong: " << it->second.phi.render() << "; ";
    } else if (eff_sat) {
        if (created.size() != 1) {
            err << "expected one new flow; ";
        } else {
            const auto& e = c.graph.flows.at(created[0]);
            if (e.source != cand.source || e.pi != cand.pi || e.target != cand.target || e.pi_prime != cand.pi_prime)
                err << "new flow endpoints; ";
            if (!same(holds(e.phi), eff)) err << "new flow condition " << e.phi.render() << "; ";
        }
    } else if (!created.empty()) {
        err << "flow created for unsatisfiable condition; ";
    }
    std::string out = err.str();
    if (!out.empty()) out += "(candidate " + cand.phi.render() + " -> " + cand.target + "/" + cand.pi_prime + ")";
    return out;
}

// Per-operation properties: strengthened siblings exclude the candidate,
// weakening only grows a condition, merges are exact disjunctions, and a
// second identical update changes nothing.
inline std::string check_update_properties(UpdateCase c, const std::vector<ffg::VarDecl>& decls) {
    std::ostringstream err;
    auto ops = ffg::update_flows(c.graph, c.cand, decls);
    for (const auto& op : ops) {
        const auto& j = op.justification;
        switch (op.kind) {
            case ffg::UpdateKind::FlowStrengthen:
                if (!op.after.empty()) {
                    auto now = c.graph.flows.at(op.after[0]).phi;
                    if (brute::sat(ffg::conjoin(now, c.cand.phi), decls)) err << "strengthened flow still overlaps; ";
                }
                break;
            case ffg::UpdateKind::FlowWeaken: {
                auto old = ffg::Condition::parse(j.at("old").get<std::string>());
                if (!brute::entails(old, c.graph.flows.at(op.after[0]).phi, decls)) err << "weaken lost models; ";
                break;
            }
            case ffg::UpdateKind::FlowMerge: {
                auto old = ffg::Condition::parse(j.at("old").get<std::string>());
                auto added = ffg::Condition::parse(j.at("added").get<std::string>());
                if (!brute::equiv(c.graph.flows.at(op.after[0]).phi, ffg::disjoin(old, added), decls))
                    err << "merge is not old || added; ";
                break;
            }
            default: break;
        }
    }
    auto snapshot = c.graph.flows;
    ffg::update_flows(c.graph, c.cand, decls);
    if (c.graph.flows.size() != snapshot.size()) err << "second update changed flow count; ";
    for (const auto& [id, e] : snapshot) {
        auto it = c.graph.flows.find(id);
        if (it == c.graph.flows.end() || !(it->second.phi == e.phi)) err << "second update changed " << id << "; ";
    }
    return err.str();
}

}  // namespace testing_support
