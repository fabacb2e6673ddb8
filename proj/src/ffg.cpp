#include "ffg/ffg.hpp"

#include <algorithm>
#include <cctype>

#include "ffg/oracle.hpp"

namespace ffg {

const Trace* Functionality::trace(std::string_view tid) const {
    for (const auto& t : traces) {
        if (t.id == tid) return &t;
    }
    return nullptr;
}

const Trace* Functionality::find_trace(const std::vector<ActionStep>& steps) const {
    for (const auto& t : traces) {
        if (t.steps == steps) return &t;
    }
    return nullptr;
}

std::string roman(unsigned n) {
    static const std::pair<unsigned, const char*> table[] = {{1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"},
                                                             {100, "C"},  {90, "XC"},  {50, "L"},  {40, "XL"},
                                                             {10, "X"},   {9, "IX"},   {5, "V"},   {4, "IV"},
                                                             {1, "I"}};
    std::string out;
    for (const auto& [v, s] : table) {
        while (n >= v) {
            out += s;
            n -= v;
        }
    }
    return out;
}

unsigned from_roman(std::string_view s) {
    auto val = [](char c) -> unsigned {
        switch (c) {
            case 'I': return 1;
            case 'V': return 5;
            case 'X': return 10;
            case 'L': return 50;
            case 'C': return 100;
            case 'D': return 500;
            case 'M': return 1000;
            default: return 0;
        }
    };
    unsigned total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned v = val(s[i]);
        if (v == 0) return 0;
        unsigned next = i + 1 < s.size() ? val(s[i + 1]) : 0;
        if (v < next) {
            total -= v;
        } else {
            total += v;
        }
    }
    return roman(total) == s ? total : 0;
}

std::string slugify(std::string_view label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "node" : out;
}

std::string_view step_origin_name(StepOrigin o) {
    switch (o) {
        case StepOrigin::Plan: return "plan";
        case StepOrigin::Navigation: return "navigation";
        case StepOrigin::Recovery: return "recovery";
        case StepOrigin::Exploration: return "exploration";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// FFG

const Functionality& FFG::functionality(std::string_view id) const {
    auto it = functionalities.find(std::string(id));
    if (it == functionalities.end()) throw GraphError("unknown functionality '" + std::string(id) + "'");
    return it->second;
}

Functionality& FFG::functionality_mut(std::string_view id) {
    auto it = functionalities.find(std::string(id));
    if (it == functionalities.end()) throw GraphError("unknown functionality '" + std::string(id) + "'");
    return it->second;
}

bool FFG::has_functionality(std::string_view id) const { return functionalities.contains(std::string(id)); }

const Trace& FFG::trace(std::string_view func, std::string_view tid) const {
    const Trace* t = functionality(func).trace(tid);
    if (!t) throw GraphError("unknown trace '" + std::string(tid) + "' of '" + std::string(func) + "'");
    return *t;
}

std::string FFG::add_functionality(const GoalDescriptor& goal) {
    std::string base = slugify(goal.label);
    std::string id = base;
    for (int k = 2; functionalities.contains(id); ++k) id = base + "_" + std::to_string(k);
    Functionality f;
    f.id = id;
    f.goal = goal;
    functionalities.emplace(id, std::move(f));
    touch();
    return id;
}

std::string FFG::add_trace(std::string_view func, std::vector<ActionStep> steps, GoalDescriptor goal) {
    if (steps.empty()) throw GraphError("traces must be non-empty");
    auto& f = functionality_mut(func);
    unsigned next = 1;
    for (const auto& t : f.traces) next = std::max(next, from_roman(t.id) + 1);
    std::string id = roman(next);
    f.traces.push_back({id, std::move(steps), std::move(goal)});
    touch();
    return id;
}

std::string FFG::add_flow(std::string source, std::string pi, Condition phi, std::string target,
                          std::string pi_prime) {
    trace(source, pi);
    trace(target, pi_prime);
    char buf[16];
    std::snprintf(buf, sizeof buf, "f%04llu", static_cast<unsigned long long>(next_flow++));
    std::string id = buf;
    flows.emplace(id, Flow{id, std::move(source), std::move(target), std::move(pi), std::move(phi),
                           std::move(pi_prime)});
    touch();
    return id;
}

void FFG::remove_flow(std::string_view id) {
    if (flows.erase(std::string(id)) == 0) throw GraphError("unknown flow '" + std::string(id) + "'");
    touch();
}

void FFG::set_phi(std::string_view id, Condition phi) {
    auto it = flows.find(std::string(id));
    if (it == flows.end()) throw GraphError("unknown flow '" + std::string(id) + "'");
    it->second.phi = std::move(phi);
    touch();
}

void FFG::check_integrity() const {
    for (const auto& [id, f] : functionalities) {
        if (f.id != id) throw GraphError("functionality key '" + id + "' does not match id '" + f.id + "'");
        std::set<std::string> tids;
        for (const auto& t : f.traces) {
            if (!tids.insert(t.id).second) throw GraphError("duplicate trace '" + t.id + "' in '" + id + "'");
            if (t.steps.empty()) throw GraphError("empty trace '" + t.id + "' in '" + id + "'");
        }
    }
    for (const auto& [id, e] : flows) {
        if (e.id != id) throw GraphError("flow key '" + id + "' does not match id '" + e.id + "'");
        auto check = [&](const std::string& func, const std::string& tid) {
            auto it = functionalities.find(func);
            if (it == functionalities.end()) throw GraphError("flow " + id + ": dangling functionality '" + func + "'");
            if (!it->second.trace(tid)) throw GraphError("flow " + id + ": dangling trace '" + func + "/" + tid + "'");
        };
        check(e.source, e.pi);
        check(e.target, e.pi_prime);
    }
}

std::vector<std::string> functionality_pages(const Functionality& f) {
    std::vector<std::string> out;
    for (const auto& t : f.traces) {
        for (const auto& s : t.steps) {
            if (std::find(out.begin(), out.end(), s.page) == out.end()) out.push_back(s.page);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Segmentation and homing

std::vector<Segment> segment_trace(const ExecutionTrace& exec, const AppSpec& spec, const SemanticOracle& oracle,
                                   double sim_threshold) {
    std::vector<Segment> out;
    Segment cur;
    std::vector<GoalDescriptor> cur_goals;

    auto close = [&]() {
        if (cur.indices.empty()) return;
        cur.goal = mean_goal(cur_goals);
        out.push_back(std::move(cur));
        cur = Segment{};
        cur_goals.clear();
    };

    int block = -1;
    bool block_dead = false;
    for (std::size_t i = 0; i < exec.steps.size(); ++i) {
        const ExecStep& es = exec.steps[i];
        if (es.plan_index != block) {
            close();
            block = es.plan_index;
            block_dead = false;
        }
        if (block_dead) continue;
        if (es.origin == StepOrigin::Navigation || es.origin == StepOrigin::Recovery) continue;
        if (es.flagged) {
            // Behavior observed around a misbehaving step is not learned.
            cur = Segment{};
            cur_goals.clear();
            block_dead = true;
            continue;
        }
        if (!es.outcome.ok() || es.step.action == ActionKind::Back) continue;
        const Page* page = spec.page(es.step.page);
        if (!page) continue;
        GoalDescriptor g = oracle.infer_page_goal(*page);
        if (!cur_goals.empty() && oracle.similarity(g, mean_goal(cur_goals)) < sim_threshold) close();
        cur.indices.push_back(i);
        cur.steps.push_back(es.step);
        cur.vars.insert(page->touched_vars.begin(), page->touched_vars.end());
        cur.state_after = es.outcome.state_after;
        cur_goals.push_back(std::move(g));
    }
    close();
    return out;
}

bool contiguous(const ExecutionTrace& exec, const Segment& a, const Segment& b) {
    if (a.indices.empty() || b.indices.empty()) return false;
    for (std::size_t i = a.indices.back() + 1; i < b.indices.front(); ++i) {
        if (exec.steps[i].origin == StepOrigin::Navigation || exec.steps[i].flagged) return false;
    }
    return true;
}

HomeResult home_segment(FFG& ffg, const Segment& seg, const SemanticOracle& oracle, double sim_threshold) {
    HomeResult res;
    const Functionality* best = nullptr;
    double best_sim = -2.0;
    for (const auto& [id, f] : ffg.functionalities) {
        double s = oracle.similarity(seg.goal, f.goal);
        if (s > best_sim) {
            best_sim = s;
            best = &f;
        }
    }
    std::string target;
    if (best && best_sim >= sim_threshold) {
        target = best->id;
        res.similarity = best_sim;
    } else {
        for (const auto& [id, f] : ffg.functionalities) {
            if (f.goal.label == seg.goal.label) {
                target = id;
                res.similarity = oracle.similarity(seg.goal, f.goal);
                break;
            }
        }
    }
    if (target.empty()) {
        target = ffg.add_functionality(seg.goal);
        res.created_node = true;
        res.similarity = best ? best_sim : 0.0;
    }
    res.func = target;
    auto& f = ffg.functionality_mut(target);
    if (const Trace* t = f.find_trace(seg.steps)) {
        res.trace = t->id;
        return res;
    }
    res.trace = ffg.add_trace(target, seg.steps, seg.goal);
    res.added_trace = true;
    auto& node = ffg.functionality_mut(target);
    node.vars.insert(seg.vars.begin(), seg.vars.end());
    if (!res.created_node) {
        std::vector<GoalDescriptor> goals;
        for (const auto& t : node.traces) goals.push_back(t.goal);
        GoalDescriptor g = mean_goal(goals);
        g.label = node.goal.label;  // labels are fixed at creation
        node.goal = std::move(g);
    }
    return res;
}

FFG initialize_ffg(ExecutionTrace& exec, const AppSpec& spec, const SemanticOracle& oracle, double sim_threshold) {
    if (exec.steps.empty()) throw GraphError("cannot initialize from an empty execution trace");
    FFG ffg;
    auto segments = segment_trace(exec, spec, oracle, sim_threshold);
    exec.segment_labels.assign(exec.steps.size(), "");
    std::vector<HomeResult> homes;
    for (const auto& seg : segments) {
        homes.push_back(home_segment(ffg, seg, oracle, sim_threshold));
        for (auto i : seg.indices) exec.segment_labels[i] = homes.back().func;
    }
    for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
        const auto& a = homes[k];
        const auto& b = homes[k + 1];
        if (a.func == b.func || !contiguous(exec, segments[k], segments[k + 1])) continue;
        bool exists = std::any_of(ffg.flows.begin(), ffg.flows.end(), [&](const auto& kv) {
            const Flow& e = kv.second;
            return e.source == a.func && e.pi == a.trace && e.target == b.func && e.pi_prime == b.trace;
        });
        if (!exists) ffg.add_flow(a.func, a.trace, Condition::truth(), b.func, b.trace);
    }
    return ffg;
}

// ---------------------------------------------------------------------------
// Queries

std::vector<Flow> flows_from(const FFG& ffg, std::string_view func, std::string_view trace) {
    ffg.trace(func, trace);
    std::vector<Flow> out;
    for (const auto& [id, e] : ffg.flows) {
        if (e.source == func && e.pi == trace) out.push_back(e);
    }
    return out;
}

std::vector<SharedPair> shared_data_pairs(const FFG& ffg) {
    std::set<std::pair<std::string, std::string>> linked;
    for (const auto& [id, e] : ffg.flows) {
        linked.emplace(e.source, e.target);
        linked.emplace(e.target, e.source);
    }
    std::vector<SharedPair> out;
    for (auto a = ffg.functionalities.begin(); a != ffg.functionalities.end(); ++a) {
        for (auto b = std::next(a); b != ffg.functionalities.end(); ++b) {
            if (linked.contains({a->first, b->first})) continue;
            std::set<std::string> shared;
            std::set_intersection(a->second.vars.begin(), a->second.vars.end(), b->second.vars.begin(),
                                  b->second.vars.end(), std::inserter(shared, shared.end()));
            if (!shared.empty()) out.push_back({a->first, b->first, std::move(shared)});
        }
    }
    return out;
}

std::vector<Flow> find_flows_into(const FFG& ffg, std::string_view target, std::string_view var) {
    ffg.functionality(target);
    std::vector<Flow> out;
    for (const auto& [id, e] : ffg.flows) {
        if (e.target == target && e.phi.mentions(var)) out.push_back(e);
    }
    return out;
}

}  // namespace ffg
