#include "ffg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ffg {

GoalDescriptor GoalDescriptor::make(std::string label, std::vector<double> vec, std::set<std::string> topics) {
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    norm = std::sqrt(norm);
    if (vec.empty() || norm == 0.0 || !std::isfinite(norm)) {
        throw Error("goal '" + label + "' has a zero or empty vector");
    }
    for (double& x : vec) x /= norm;
    return {std::move(label), std::move(vec), std::move(topics)};
}

double cosine(const GoalDescriptor& a, const GoalDescriptor& b) {
    if (a.vector.size() != b.vector.size()) {
        throw Error("goal vector dimensions differ (" + std::to_string(a.vector.size()) + " vs " +
                    std::to_string(b.vector.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i) {
        dot += a.vector[i] * b.vector[i];
        na += a.vector[i] * a.vector[i];
        nb += b.vector[i] * b.vector[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

GoalDescriptor mean_goal(std::span<const GoalDescriptor> parts, std::span<const double> weights) {
    if (parts.empty()) throw Error("mean of no goals");
    std::vector<double> acc(parts.front().vector.size(), 0.0);
    std::vector<std::pair<std::string, double>> label_weight;
    std::set<std::string> topics;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        double w = weights.empty() ? 1.0 : weights[i];
        if (parts[i].vector.size() != acc.size()) throw Error("goal vector dimensions differ");
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * parts[i].vector[k];
        auto it = std::find_if(label_weight.begin(), label_weight.end(),
                               [&](const auto& p) { return p.first == parts[i].label; });
        if (it == label_weight.end()) {
            label_weight.emplace_back(parts[i].label, w);
        } else {
            it->second += w;
        }
        topics.insert(parts[i].topics.begin(), parts[i].topics.end());
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < label_weight.size(); ++i) {
        if (label_weight[i].second > label_weight[best].second) best = i;
    }
    return GoalDescriptor::make(label_weight[best].first, std::move(acc), std::move(topics));
}

// ---------------------------------------------------------------------------

GoalDescriptor SpecOracle::infer_page_goal(const Page& page) const {
    if (page.goal_label.empty()) throw Error("page '" + page.id + "' has no goal label");
    return GoalDescriptor::make(page.goal_label, page.goal_vector, page.topics);
}

double SpecOracle::similarity(const GoalDescriptor& a, const GoalDescriptor& b) const { return cosine(a, b); }

ActionStep default_action(const std::string& page, const Widget& w) {
    switch (w.kind) {
        case WidgetKind::Input:
            return {page, w.id, ActionKind::Input, w.values.empty() ? std::string() : w.values.front()};
        case WidgetKind::Toggle:
        case WidgetKind::Checkbox:
            return {page, w.id, ActionKind::ToggleOn, ""};
        default:
            return {page, w.id, ActionKind::Click, ""};
    }
}

std::vector<ActionStep> SpecOracle::essential_actions(const Functionality& func, const AppSpec& spec) const {
    std::set<std::pair<std::string, std::string>> used;
    for (const auto& t : func.traces) {
        for (const auto& s : t.steps) used.emplace(s.page, s.widget);
    }
    std::vector<ActionStep> out;
    for (const auto& pid : functionality_pages(func)) {
        const Page* p = spec.page(pid);
        if (!p) continue;
        for (const auto& w : p->widgets) {
            if (used.contains({pid, w.id})) continue;
            bool topical = std::any_of(w.topics.begin(), w.topics.end(),
                                       [&](const std::string& t) { return func.goal.topics.contains(t); });
            if (topical) out.push_back(default_action(pid, w));
        }
    }
    return out;
}

ClusterResult SpecOracle::cluster_trace_goals(const std::vector<std::pair<std::string, GoalDescriptor>>& goals,
                                              double intra_threshold) const {
    ClusterResult res;
    if (goals.empty()) return res;
    // Centroid-linkage greedy agglomeration over member indices.
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < goals.size(); ++i) clusters.push_back({i});
    auto centroid = [&](const std::vector<std::size_t>& c) {
        std::vector<GoalDescriptor> parts;
        for (auto i : c) parts.push_back(goals[i].second);
        return mean_goal(parts);
    };
    while (clusters.size() > 1) {
        double best = -2.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            auto ci = centroid(clusters[i]);
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double s = cosine(ci, centroid(clusters[j]));
                if (s > best + 1e-12) {
                    best = s;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < intra_threshold) break;
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(clusters[bi].begin(), clusters[bi].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    std::sort(clusters.begin(), clusters.end());
    double max_inter = -1.0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            for (auto a : clusters[i]) {
                for (auto b : clusters[j]) max_inter = std::max(max_inter, cosine(goals[a].second, goals[b].second));
            }
        }
    }
    res.separation = clusters.size() < 2 ? 1.0 : std::clamp(1.0 - max_inter, 0.0, 1.0);
    for (const auto& c : clusters) {
        std::vector<std::string> ids;
        for (auto i : c) ids.push_back(goals[i].first);
        res.clusters.push_back(std::move(ids));
    }
    return res;
}

Condition SpecOracle::infer_flow_condition(const Valuation& prefix_state, const Functionality& target,
                                           const AppSpec& spec) const {
    // Atoms describe how the state departs from the app's initial state,
    // restricted to the target's variables.
    std::vector<Atom> atoms;
    for (const auto& var : target.vars) {
        auto cur = prefix_state.find(var);
        auto init = spec.initial_valuation.find(var);
        if (cur == prefix_state.end() || init == spec.initial_valuation.end()) continue;
        if (const auto* now = std::get_if<ElementSet>(&cur->second)) {
            const auto& was = std::get<ElementSet>(init->second);
            for (const auto& e : *now) {
                if (!was.contains(e)) atoms.push_back(contains(var, e));
            }
            for (const auto& e : was) {
                if (!now->contains(e)) atoms.push_back(not_contains(var, e));
            }
        } else if (cur->second != init->second) {
            atoms.push_back(eq(var, std::get<std::string>(cur->second)));
        }
    }
    return Condition::all_of(std::move(atoms));
}

std::unique_ptr<SemanticOracle> make_oracle(const std::string& kind) {
    if (kind == "spec") return std::make_unique<SpecOracle>();
    if (kind == "remote") {
        const char* ep = std::getenv("ORACLE_ENDPOINT");
        if (!ep || !*ep) throw Error("--oracle remote needs ORACLE_ENDPOINT");
        return std::make_unique<RemoteOracle>(ep);
    }
    throw Error("unknown oracle '" + kind + "'");
}

}  // namespace ffg
