#include "ffg/app_spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ffg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) { throw SpecError(where + ": " + msg); }

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
    return obj.at(key);
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string opt_string(const json& obj, const char* key, const std::string& where, std::string dflt = {}) {
    if (!obj.contains(key) || obj.at(key).is_null()) return dflt;
    if (!obj.at(key).is_string()) fail(where + "." + key, "expected a string");
    return obj.at(key).get<std::string>();
}

bool opt_bool(const json& obj, const char* key, const std::string& where, bool dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_boolean()) fail(where + "." + key, "expected a boolean");
    return obj.at(key).get<bool>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    const json& arr = obj.at(key);
    if (!arr.is_array()) fail(where + "." + key, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) fail(where + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

const json& array_field(const json& obj, const char* key, const std::string& where, bool required) {
    static const json empty = json::array();
    if (!obj.contains(key)) {
        if (required) fail(where, std::string("missing field '") + key + "'");
        return empty;
    }
    if (!obj.at(key).is_array()) fail(where + "." + key, "expected an array");
    return obj.at(key);
}

Condition parse_cond(const json& obj, const char* key, const std::string& where) {
    std::string text = opt_string(obj, key, where, "true");
    try {
        return Condition::parse(text);
    } catch (const ConditionError& e) {
        fail(where + "." + key, e.what());
    }
}

VarDecl parse_decl(const json& j, const std::string& where) {
    std::string name = get_string(j, "name", where);
    std::string type = get_string(j, "type", where);
    try {
        if (type == "bool" || type == "boolean") return VarDecl::boolean(name);
        if (type == "enum") return VarDecl::enumeration(name, string_list(j, "labels", where));
        if (type == "set_of") return VarDecl::set_of(name, string_list(j, "universe", where));
        if (type == "int_range") {
            const json& lo = require(j, "lo", where);
            const json& hi = require(j, "hi", where);
            if (!lo.is_number_integer() || !hi.is_number_integer()) fail(where, "lo/hi must be integers");
            return VarDecl::int_range(name, lo.get<int>(), hi.get<int>());
        }
    } catch (const ConditionError& e) {
        fail(where, e.what());
    }
    fail(where + ".type", "unknown domain type '" + type + "'");
}

Value parse_value(const VarDecl& d, const json& v, const std::string& where) {
    if (d.is_set()) {
        if (!v.is_array()) fail(where, "expected an array for set variable '" + d.name + "'");
        ElementSet s;
        for (const auto& e : v) {
            if (!e.is_string()) fail(where, "set elements must be strings");
            s.insert(e.get<std::string>());
        }
        return s;
    }
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_string()) return v.get<std::string>();
    fail(where, "unsupported value for '" + d.name + "'");
}

ActionStep parse_step(const json& j, const std::string& where) {
    ActionStep s;
    s.page = get_string(j, "page", where);
    auto action = parse_action_kind(opt_string(j, "action", where, "click"));
    if (!action) fail(where + ".action", "unknown action");
    s.action = *action;
    if (s.action != ActionKind::Back) s.widget = get_string(j, "widget", where);
    s.text = opt_string(j, "text", where);
    return s;
}

Widget parse_widget(const json& j, const std::string& where) {
    Widget w;
    w.id = get_string(j, "id", where);
    auto kind = parse_widget_kind(opt_string(j, "kind", where, "button"));
    if (!kind) fail(where + ".kind", "unknown widget kind");
    w.kind = *kind;
    w.text = opt_string(j, "text", where, w.id);
    auto topics = string_list(j, "topics", where);
    w.topics = {topics.begin(), topics.end()};
    w.visible = opt_bool(j, "visible", where, true);
    w.enabled = opt_bool(j, "enabled", where, true);
    w.optional = opt_bool(j, "optional", where, false);
    w.order_independent = opt_bool(j, "order_independent", where, false);
    w.values = string_list(j, "values", where);
    return w;
}

Page parse_page(const json& j, const std::string& where) {
    Page p;
    p.id = get_string(j, "id", where);
    p.title = opt_string(j, "title", where, p.id);
    const json& goal = require(j, "goal", where);
    p.goal_label = get_string(goal, "label", where + ".goal");
    const json& vec = require(goal, "vector", where + ".goal");
    if (!vec.is_array()) fail(where + ".goal.vector", "expected an array");
    for (const auto& x : vec) {
        if (!x.is_number()) fail(where + ".goal.vector", "expected numbers");
        p.goal_vector.push_back(x.get<double>());
    }
    auto topics = string_list(goal, "topics", where + ".goal");
    p.topics = {topics.begin(), topics.end()};
    auto touched = string_list(j, "touched_vars", where);
    p.touched_vars = {touched.begin(), touched.end()};
    const json& widgets = array_field(j, "widgets", where, false);
    for (std::size_t i = 0; i < widgets.size(); ++i) {
        p.widgets.push_back(parse_widget(widgets[i], where + ".widgets[" + std::to_string(i) + "]"));
    }
    return p;
}

TransitionRule parse_rule(const json& j, const std::string& where) {
    TransitionRule r;
    r.source_page = get_string(j, "page", where);
    r.widget = get_string(j, "widget", where);
    auto action = parse_action_kind(opt_string(j, "action", where, "click"));
    if (!action) fail(where + ".action", "unknown action");
    r.action = *action;
    if (j.contains("input") && !j.at("input").is_null()) r.input = get_string(j, "input", where);
    r.guard = parse_cond(j, "guard", where);
    r.target_page = opt_string(j, "target", where);
    const json& updates = array_field(j, "updates", where, false);
    for (std::size_t i = 0; i < updates.size(); ++i) {
        std::string w = where + ".updates[" + std::to_string(i) + "]";
        const json& u = updates[i];
        Mutation m;
        if (u.contains("set")) {
            m.kind = Mutation::Set;
            m.var = get_string(u, "set", w);
        } else if (u.contains("insert")) {
            m.kind = Mutation::Insert;
            m.var = get_string(u, "insert", w);
        } else if (u.contains("remove")) {
            m.kind = Mutation::Remove;
            m.var = get_string(u, "remove", w);
        } else {
            fail(w, "expected one of set/insert/remove");
        }
        const json& v = require(u, "value", w);
        if (v.is_boolean()) {
            m.value = v.get<bool>() ? "true" : "false";
        } else if (v.is_number_integer()) {
            m.value = std::to_string(v.get<long long>());
        } else if (v.is_string()) {
            m.value = v.get<std::string>();
        } else {
            fail(w + ".value", "expected a scalar");
        }
        r.updates.push_back(std::move(m));
    }
    const json& events = array_field(j, "events", where, false);
    for (std::size_t i = 0; i < events.size(); ++i) {
        std::string w = where + ".events[" + std::to_string(i) + "]";
        if (events[i].contains("crash")) {
            r.events.push_back({Event::Crash, get_string(events[i], "crash", w)});
        } else if (events[i].contains("toast")) {
            r.events.push_back({Event::Toast, get_string(events[i], "toast", w)});
        } else {
            fail(w, "expected crash or toast");
        }
    }
    if (j.contains("abstract_op") && !j.at("abstract_op").is_null()) {
        const json& op = j.at("abstract_op");
        AbstractOpTemplate t;
        t.tag = get_string(op, "tag", where + ".abstract_op");
        if (op.contains("args")) {
            if (!op.at("args").is_object()) fail(where + ".abstract_op.args", "expected an object");
            for (const auto& [k, v] : op.at("args").items()) {
                if (!v.is_string()) fail(where + ".abstract_op.args." + k, "expected a string");
                t.args[k] = v.get<std::string>();
            }
        }
        r.abstract_op = std::move(t);
    }
    return r;
}

}  // namespace

AppSpec load_spec(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("document: ") + e.what());
    }
    if (!doc.is_object()) throw SpecError("document: expected an object");

    AppSpec spec;
    spec.name = get_string(doc, "name", "document");
    spec.main_page = get_string(doc, "main_page", "document");
    const json& dim = require(doc, "embedding_dim", "document");
    if (!dim.is_number_unsigned()) throw SpecError("embedding_dim: expected a positive integer");
    spec.embedding_dim = dim.get<std::size_t>();

    const json& vars = array_field(doc, "variables", "document", false);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        spec.var_decls.push_back(parse_decl(vars[i], "variables[" + std::to_string(i) + "]"));
    }
    if (doc.contains("initial")) {
        const json& init = doc.at("initial");
        if (!init.is_object()) throw SpecError("initial: expected an object");
        for (const auto& [k, v] : init.items()) {
            const VarDecl* d = spec.decl(k);
            if (!d) throw SpecError("initial." + k + ": undeclared variable");
            spec.initial_valuation[k] = parse_value(*d, v, "initial." + k);
        }
    }
    // Dynamic visibility/enablement variables default to the widget's static flag.
    const json& pages = array_field(doc, "pages", "document", true);
    for (std::size_t i = 0; i < pages.size(); ++i) {
        spec.pages.push_back(parse_page(pages[i], "pages[" + std::to_string(i) + "]"));
    }
    for (const auto& p : spec.pages) {
        for (const auto& w : p.widgets) {
            for (auto [name, flag] : {std::pair{visibility_var(p.id, w.id), w.visible},
                                      std::pair{enabled_var(p.id, w.id), w.enabled}}) {
                if (spec.decl(name) && !spec.initial_valuation.contains(name)) {
                    spec.initial_valuation[name] = std::string(flag ? "true" : "false");
                }
            }
        }
    }
    const json& rules = array_field(doc, "rules", "document", false);
    for (std::size_t i = 0; i < rules.size(); ++i) {
        spec.rules.push_back(parse_rule(rules[i], "rules[" + std::to_string(i) + "]"));
    }
    const json& effects = array_field(doc, "expected_effects", "document", false);
    for (std::size_t i = 0; i < effects.size(); ++i) {
        std::string w = "expected_effects[" + std::to_string(i) + "]";
        spec.expected_effects.push_back({get_string(effects[i], "abstract_op", w),
                                         get_string(effects[i], "postcondition", w),
                                         opt_string(effects[i], "description", w)});
    }
    if (doc.contains("bootstrap")) {
        const json& boot = doc.at("bootstrap");
        if (!boot.is_array()) throw SpecError("bootstrap: expected an array");
        std::vector<ActionStep> steps;
        for (std::size_t i = 0; i < boot.size(); ++i) {
            steps.push_back(parse_step(boot[i], "bootstrap[" + std::to_string(i) + "]"));
        }
        spec.bootstrap = std::move(steps);
    }
    spec.anomalous_toasts = string_list(doc, "anomalous_toasts", "document");
    const json& bugs = array_field(doc, "injected_bugs", "document", false);
    for (std::size_t i = 0; i < bugs.size(); ++i) {
        std::string w = "injected_bugs[" + std::to_string(i) + "]";
        spec.injected_bugs.push_back({get_string(bugs[i], "id", w), get_string(bugs[i], "kind", w),
                                      opt_string(bugs[i], "match", w), opt_string(bugs[i], "page", w),
                                      opt_string(bugs[i], "description", w)});
    }
    spec.validate();
    return spec;
}

AppSpec load_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_spec(ss.str());
    } catch (const SpecError& e) {
        throw SpecError(path.string() + ": " + e.what());
    }
}

}  // namespace ffg
