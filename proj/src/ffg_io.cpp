#include "ffg/ffg_io.hpp"

#include <fstream>
#include <sstream>

namespace ffg {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) { throw GraphError(path + ": " + msg); }

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
    if (!j.contains(key)) bad(path, std::string("missing '") + key + "'");
    return j.at(key);
}

std::string str(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_string()) bad(path + "." + key, "expected a string");
    return v.get<std::string>();
}

GoalDescriptor goal_from_json(const json& j, const std::string& path) {
    GoalDescriptor g;
    g.label = str(j, "label", path);
    const json& vec = field(j, "vector", path);
    if (!vec.is_array()) bad(path + ".vector", "expected an array");
    for (const auto& x : vec) {
        if (!x.is_number()) bad(path + ".vector", "expected numbers");
        g.vector.push_back(x.get<double>());
    }
    const json& topics = field(j, "topics", path);
    if (!topics.is_array()) bad(path + ".topics", "expected an array");
    for (const auto& t : topics) g.topics.insert(t.get<std::string>());
    return g;
}

}  // namespace

json to_json(const ActionStep& s) {
    json j = {{"page", s.page}, {"action", std::string(action_kind_name(s.action))}};
    if (s.action != ActionKind::Back) j["widget"] = s.widget;
    if (!s.text.empty()) j["text"] = s.text;
    return j;
}

ActionStep step_from_json(const json& j, const std::string& path) {
    ActionStep s;
    s.page = str(j, "page", path);
    auto a = parse_action_kind(str(j, "action", path));
    if (!a) bad(path + ".action", "unknown action");
    s.action = *a;
    if (s.action != ActionKind::Back) s.widget = str(j, "widget", path);
    if (j.contains("text")) s.text = str(j, "text", path);
    return s;
}

json to_json(const Valuation& v) {
    json j = json::object();
    for (const auto& [k, val] : v) {
        if (const auto* s = std::get_if<std::string>(&val)) {
            j[k] = *s;
        } else {
            j[k] = std::get<ElementSet>(val);
        }
    }
    return j;
}

json to_json(const GoalDescriptor& g) { return {{"label", g.label}, {"vector", g.vector}, {"topics", g.topics}}; }

json to_json(const StepOutcome& o) {
    json j = {{"status", std::string(step_status_name(o.status))}, {"page_before", o.page_before}};
    if (o.new_page) j["new_page"] = *o.new_page;
    json events = json::array();
    for (const auto& e : o.events) {
        events.push_back({{e.kind == Event::Crash ? "crash" : "toast", e.text}});
    }
    j["events"] = events;
    if (o.abstract_op) j["abstract_op"] = {{"tag", o.abstract_op->tag}, {"args", o.abstract_op->args}};
    j["state_after"] = to_json(o.state_after);
    return j;
}

json to_json(const ExecutionTrace& t) {
    json steps = json::array();
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        json js = {{"step", to_json(s.step)},
                   {"outcome", to_json(s.outcome)},
                   {"plan_index", s.plan_index},
                   {"origin", std::string(step_origin_name(s.origin))},
                   {"flagged", s.flagged}};
        if (i < t.segment_labels.size() && !t.segment_labels[i].empty()) js["segment"] = t.segment_labels[i];
        steps.push_back(std::move(js));
    }
    return {{"steps", steps}, {"budget_exhausted", t.budget_exhausted}, {"diagnostics", t.diagnostics}};
}

json to_json(const FFG& g) {
    json funcs = json::object();
    for (const auto& [id, f] : g.functionalities) {
        json traces = json::array();
        for (const auto& t : f.traces) {
            json steps = json::array();
            for (const auto& s : t.steps) steps.push_back(to_json(s));
            traces.push_back({{"id", t.id}, {"steps", steps}, {"goal", to_json(t.goal)}});
        }
        funcs[id] = {{"goal", to_json(f.goal)}, {"vars", f.vars}, {"traces", traces}};
    }
    json flows = json::object();
    for (const auto& [id, e] : g.flows) {
        flows[id] = {{"source", e.source},
                     {"pi", e.pi},
                     {"phi", e.phi.render()},
                     {"target", e.target},
                     {"pi_prime", e.pi_prime}};
    }
    return {{"format", "ffg/1"},
            {"revision", g.revision},
            {"next_flow", g.next_flow},
            {"functionalities", funcs},
            {"flows", flows}};
}

FFG ffg_from_json(const json& j) {
    if (!j.is_object()) bad("$", "expected an object");
    if (str(j, "format", "$") != "ffg/1") bad("$.format", "unsupported format");
    FFG g;
    const json& rev = field(j, "revision", "$");
    const json& nf = field(j, "next_flow", "$");
    if (!rev.is_number_unsigned() || !nf.is_number_unsigned()) bad("$", "revision/next_flow must be unsigned");
    g.revision = rev.get<std::uint64_t>();
    g.next_flow = nf.get<std::uint64_t>();

    const json& funcs = field(j, "functionalities", "$");
    if (!funcs.is_object()) bad("$.functionalities", "expected an object");
    for (const auto& [id, jf] : funcs.items()) {
        std::string path = "$.functionalities." + id;
        Functionality f;
        f.id = id;
        f.goal = goal_from_json(field(jf, "goal", path), path + ".goal");
        for (const auto& v : field(jf, "vars", path)) f.vars.insert(v.get<std::string>());
        const json& traces = field(jf, "traces", path);
        if (!traces.is_array()) bad(path + ".traces", "expected an array");
        for (std::size_t i = 0; i < traces.size(); ++i) {
            std::string tp = path + ".traces[" + std::to_string(i) + "]";
            Trace t;
            t.id = str(traces[i], "id", tp);
            const json& steps = field(traces[i], "steps", tp);
            if (!steps.is_array()) bad(tp + ".steps", "expected an array");
            for (std::size_t k = 0; k < steps.size(); ++k) {
                t.steps.push_back(step_from_json(steps[k], tp + ".steps[" + std::to_string(k) + "]"));
            }
            t.goal = goal_from_json(field(traces[i], "goal", tp), tp + ".goal");
            f.traces.push_back(std::move(t));
        }
        g.functionalities.emplace(id, std::move(f));
    }
    const json& flows = field(j, "flows", "$");
    if (!flows.is_object()) bad("$.flows", "expected an object");
    for (const auto& [id, je] : flows.items()) {
        std::string path = "$.flows." + id;
        Flow e;
        e.id = id;
        e.source = str(je, "source", path);
        e.pi = str(je, "pi", path);
        e.target = str(je, "target", path);
        e.pi_prime = str(je, "pi_prime", path);
        try {
            e.phi = Condition::parse(str(je, "phi", path));
        } catch (const ConditionError& ex) {
            bad(path + ".phi", ex.what());
        }
        g.flows.emplace(id, std::move(e));
    }
    g.check_integrity();
    return g;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

std::string serialize(const FFG& g) { return dump_canonical(to_json(g)); }

FFG deserialize(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw GraphError(std::string("$: ") + e.what());
    }
    try {
        return ffg_from_json(j);
    } catch (const json::exception& e) {
        throw GraphError(std::string("$: ") + e.what());
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string render_text(const FFG& g) {
    std::ostringstream os;
    os << "FFG revision " << g.revision << ": " << g.functionalities.size() << " functionalities, "
       << g.flows.size() << " flows\n";
    for (const auto& [id, f] : g.functionalities) {
        os << "\n[" << id << "] " << f.goal.label << "\n  vars:";
        for (const auto& v : f.vars) os << ' ' << v;
        os << '\n';
        for (const auto& t : f.traces) {
            os << "  " << t.id << ":";
            for (std::size_t i = 0; i < t.steps.size(); ++i) os << (i ? ", " : " ") << t.steps[i].render();
            os << '\n';
        }
    }
    if (!g.flows.empty()) os << '\n';
    for (const auto& [id, e] : g.flows) {
        os << id << ": " << e.source << "/" << e.pi << " -[" << e.phi.render() << "]-> " << e.target << "/"
           << e.pi_prime << '\n';
    }
    return os.str();
}

}  // namespace ffg
