#include "ffg/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "ffg/app_spec_io.hpp"
#include "ffg/ltv_generator.hpp"
#include "ffg/stv_generator.hpp"

namespace ffg {

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << "iter,flows,functionalities,scenarios,bugs_crash,bugs_functional,actions,millis\n";
    for (const auto& r : rows) {
        os << r.iter << ',' << r.flows << ',' << r.functionalities << ',' << r.scenarios << ',' << r.bugs_crash << ','
           << r.bugs_functional << ',' << r.actions << ',' << r.millis << '\n';
    }
    return os.str();
}

void emit_metrics(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
    write_file(path, metrics_csv(rows));
}

namespace {

int widget_rank(const Widget* w) {
    if (!w) return 9;
    switch (w->kind) {
        case WidgetKind::Input: return 0;
        case WidgetKind::Toggle:
        case WidgetKind::Checkbox: return 1;
        case WidgetKind::Button: return 2;
        case WidgetKind::ListItem: return 3;
        case WidgetKind::Icon: return 4;
    }
    return 5;
}

}  // namespace

ExecutionTrace bootstrap_explore(SimulatorSession& s, std::size_t budget, std::uint64_t seed) {
    ExecutionTrace t;
    std::mt19937_64 rng(seed);
    std::set<ActionStep> visited;
    auto record = [&](const ActionStep& a) {
        t.steps.push_back({a, s.perform(a), 0, StepOrigin::Plan, false});
        return t.steps.back().outcome;
    };
    while (t.steps.size() < budget && !s.crashed()) {
        std::vector<std::tuple<int, std::uint64_t, std::size_t>> ranked;
        auto cands = candidate_actions(s, s.current_page());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (visited.contains(cands[i])) continue;
            ranked.emplace_back(widget_rank(s.spec().widget(cands[i].page, cands[i].widget)), rng(), i);
        }
        if (ranked.empty()) {
            std::string before = s.current_page();
            record(ActionStep::back(before));
            if (s.current_page() == before) break;  // nowhere left to go
            continue;
        }
        std::sort(ranked.begin(), ranked.end());
        const ActionStep& pick = cands[std::get<2>(ranked.front())];
        visited.insert(pick);
        record(pick);
    }
    if (t.steps.size() >= budget) t.budget_exhausted = true;
    return t;
}

ExecutionTrace bootstrap_scripted(SimulatorSession& s, const std::vector<ActionStep>& steps) {
    ExecutionTrace t;
    for (const auto& a : steps) {
        if (s.crashed()) break;
        t.steps.push_back({a, s.perform(a), 0, StepOrigin::Plan, false});
    }
    return t;
}

std::vector<TestScenario> generate_iteration(const FFG& ffg, const SimulatorSession& fresh,
                                             const SemanticOracle& oracle, const RunConfig& cfg, std::size_t iter,
                                             std::map<std::string, std::size_t>& last_seen,
                                             std::vector<std::string>* notes) {
    const AppSpec& spec = fresh.spec();
    auto enabled = [&](const char* phase) { return !cfg.disabled.contains(phase); };
    std::vector<std::vector<TestScenario>> groups;
    auto group = [&](std::vector<TestScenario> v) {
        if (!v.empty()) groups.push_back(std::move(v));
    };
    auto by_strategy = [&](std::vector<TestScenario> all, std::initializer_list<const char*> order) {
        for (const char* st : order) {
            std::vector<TestScenario> g;
            for (auto& s : all) {
                if (s.strategy == st) g.push_back(std::move(s));
            }
            group(std::move(g));
        }
    };

    if (enabled("ltv-func")) {
        group(gen_completeness(ffg, spec, oracle));
        group(gen_independence(ffg, oracle, cfg.sep_threshold, cfg.sim_threshold));
    }
    if (enabled("ltv-flow")) {
        std::vector<TestScenario> part, mv, inv;
        for (const auto& [id, e] : ffg.flows) {
            for (auto& s : gen_condition_partition(e, ffg, spec)) part.push_back(std::move(s));
            for (auto& s : gen_minimal_violation(e, ffg, spec, notes)) mv.push_back(std::move(s));
            for (auto& s : gen_condition_invariant(e, ffg, fresh)) inv.push_back(std::move(s));
        }
        group(std::move(part));
        group(std::move(mv));
        group(std::move(inv));
    }
    if (enabled("stv-single")) {
        std::vector<TestScenario> all;
        for (const auto& [id, e] : ffg.flows) {
            for (auto& s : gen_single_flow(e, ffg, fresh)) all.push_back(std::move(s));
        }
        by_strategy(std::move(all), {strategy::kHideShow, strategy::kChangeOrder, strategy::kToggle});
    }
    if (enabled("stv-cross")) {
        by_strategy(gen_cross_flow(ffg, spec),
                    {strategy::kCreateDelete, strategy::kModifyAttribute, strategy::kConsumeProduce});
    }

    std::vector<TestScenario> out;
    for (auto& g : groups) {
        auto key = [](const TestScenario& s) { return s.strategy + "|" + s.object; };
        std::stable_sort(g.begin(), g.end(), [&](const TestScenario& a, const TestScenario& b) {
            auto ia = last_seen.find(key(a));
            auto ib = last_seen.find(key(b));
            return (ia == last_seen.end() ? 0 : ia->second) < (ib == last_seen.end() ? 0 : ib->second);
        });
        if (g.size() > cfg.per_strategy) g.resize(cfg.per_strategy);
        for (auto& s : g) last_seen[key(s)] = iter;
        for (auto& s : g) out.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "it%zu-%03zu", iter, i + 1);
        out[i].id = buf;
    }
    return out;
}

RunResult run_loop(const RunConfig& cfg, std::shared_ptr<const AppSpec> spec) {
    RunResult r;
    auto oracle = make_oracle(cfg.oracle);
    auto say = [&](const std::string& line) { r.log.push_back(line); };
    std::set<std::string> keys;
    auto file_reports = [&](std::vector<BugReport>& reports) {
        for (auto& rep : reports) {
            if (!keys.insert(rep.dedup_key).second) {
                ++r.duplicate_reports;
                continue;
            }
            char buf[16];
            std::snprintf(buf, sizeof buf, "bug-%04zu", r.bugs.size() + 1);
            rep.id = buf;
            say("report " + rep.id + " " + rep.kind + "/" + rep.violation_kind + " on " + rep.page + " from " +
                rep.scenario);
            r.bugs.push_back(rep);
        }
    };
    auto count_bugs = [&](const char* kind) {
        return static_cast<std::size_t>(
            std::count_if(r.bugs.begin(), r.bugs.end(), [&](const BugReport& b) { return b.kind == kind; }));
    };

    say("app " + spec->name + " seed " + std::to_string(cfg.seed) + " oracle " + oracle->name());

    // Bootstrap and initialization.
    SimulatorSession boot = reset(spec, cfg.seed);
    if (spec->bootstrap) {
        r.bootstrap = bootstrap_scripted(boot, *spec->bootstrap);
    } else {
        r.bootstrap = bootstrap_explore(boot, std::max<std::size_t>(1, cfg.max_actions / 10), cfg.seed);
    }
    r.actions = r.bootstrap.steps.size();
    {
        FFG none;
        ScenarioExecutor detector(none, *spec, *oracle, cfg.exec);
        std::vector<BugReport> reports;
        for (std::size_t i = 0; i < r.bootstrap.steps.size(); ++i) {
            for (auto& rep : detector.detect(r.bootstrap.steps[i], "bootstrap")) {
                rep.step_index = i;
                rep.trace = r.bootstrap;
                reports.push_back(std::move(rep));
            }
        }
        file_reports(reports);
    }
    say("bootstrap: " + std::to_string(r.bootstrap.steps.size()) + " actions");
    r.ffg = initialize_ffg(r.bootstrap, *spec, *oracle, cfg.sim_threshold);
    r.ffg.check_integrity();
    r.initial = r.ffg;
    say("initialized: " + std::to_string(r.ffg.functionalities.size()) + " functionalities, " +
        std::to_string(r.ffg.flows.size()) + " flows");

    std::map<std::string, std::size_t> last_seen;
    std::size_t scenarios_total = 0;
    UpdateThresholds th{cfg.sim_threshold, cfg.sep_threshold, cfg.sim_threshold};

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        if (r.actions >= cfg.max_actions) {
            say("action budget exhausted before iteration " + std::to_string(iter));
            break;
        }
        IterationLog it;
        SimulatorSession fresh = reset(spec, cfg.seed);
        std::vector<std::string> notes;
        it.scenarios = generate_iteration(r.ffg, fresh, *oracle, cfg, iter, last_seen, &notes);
        for (const auto& n : notes) say("iteration " + std::to_string(iter) + ": " + n);

        // Every scenario gets the same budget so results do not depend on --jobs.
        const std::size_t budget = std::min(cfg.exec.scenario_budget, cfg.max_actions - r.actions);
        ScenarioExecutor ex(r.ffg, *spec, *oracle, cfg.exec);
        std::vector<std::optional<ScenarioResult>> results(it.scenarios.size());
        auto run_one = [&](std::size_t i) {
            SimulatorSession s = reset(spec, cfg.seed);
            results[i] = ex.execute(it.scenarios[i], s, budget);
        };
        if (cfg.jobs > 1) {
            const long n = static_cast<long>(it.scenarios.size());
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic, 1)
            for (long i = 0; i < n; ++i) run_one(static_cast<std::size_t>(i));
        }

        std::vector<ExecutionTrace> traces;
        for (std::size_t i = 0; i < it.scenarios.size(); ++i) {
            if (!results[i]) run_one(i);
            ScenarioResult& res = *results[i];
            if (r.actions + res.actions > cfg.max_actions) {
                say(it.scenarios[i].id + " would exceed the action budget; iteration stops");
                break;
            }
            r.actions += res.actions;
            ++scenarios_total;
            say(it.scenarios[i].id + " " + it.scenarios[i].strategy + " " + it.scenarios[i].object + ": " +
                std::to_string(res.actions) + " actions" + (res.completed ? "" : ", incomplete"));
            for (const auto& d : res.trace.diagnostics) say("  " + d);
            file_reports(res.reports);
            traces.push_back(res.trace);
            it.results.push_back(std::move(res));
        }

        it.updates = apply_iteration(r.ffg, traces, *spec, *oracle, th);
        for (std::size_t i = 0; i < traces.size(); ++i) it.results[i].trace.segment_labels = traces[i].segment_labels;
        std::string counts;
        for (const auto& [k, v] : it.updates.counts) counts += " " + k + "=" + std::to_string(v);
        say("iteration " + std::to_string(iter) + " updates:" + (counts.empty() ? " none" : counts) + ", revision " +
            std::to_string(r.ffg.revision));
        it.ffg_snapshot = serialize(r.ffg);

        MetricsRow row;
        row.iter = iter;
        row.flows = r.ffg.flows.size();
        row.functionalities = r.ffg.functionalities.size();
        row.scenarios = scenarios_total;
        row.bugs_crash = count_bugs("crash");
        row.bugs_functional = count_bugs("functional");
        row.actions = r.actions;
        row.millis = r.actions * kMillisPerAction;
        r.metrics.push_back(row);
        r.iterations.push_back(std::move(it));
    }
    say("done: " + std::to_string(r.bugs.size()) + " unique reports, " + std::to_string(r.duplicate_reports) +
        " duplicates suppressed, " + std::to_string(r.actions) + " actions");
    return r;
}

namespace {

void write_artifacts(const RunConfig& cfg, const AppSpec& spec, const RunResult& r) {
    const auto& dir = cfg.out_dir;
    std::filesystem::create_directories(dir);
    write_file(dir / ("ffg-r" + std::to_string(r.initial.revision) + ".json"), serialize(r.initial));
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
        const auto& it = r.iterations[i];
        const std::string n = std::to_string(i + 1);
        json sc = json::array();
        for (std::size_t k = 0; k < it.scenarios.size(); ++k) {
            json j = to_json(it.scenarios[k]);
            j["executed"] = k < it.results.size();
            if (k < it.results.size()) j["actions"] = it.results[k].actions;
            sc.push_back(std::move(j));
        }
        write_file(dir / ("scenarios-" + n + ".json"), dump_canonical(sc));
        json ops = json::array();
        for (const auto& op : it.updates.ops) ops.push_back(to_json(op));
        write_file(dir / ("updates-" + n + ".json"), dump_canonical({{"iteration", i + 1},
                                                                     {"revision", it.updates.revision},
                                                                     {"counts", it.updates.counts},
                                                                     {"mutations", it.updates.mutations},
                                                                     {"ops", ops}}));
        write_file(dir / ("ffg-r" + std::to_string(it.updates.revision) + ".json"), it.ffg_snapshot);
        for (const auto& res : it.results) {
            json keys = json::array();
            for (const auto& rep : res.reports) keys.push_back(rep.dedup_key);
            write_file(dir / "traces" / (res.scenario_id + ".json"),
                       dump_canonical({{"scenario", res.scenario_id},
                                       {"actions", res.actions},
                                       {"completed", res.completed},
                                       {"report_keys", keys},
                                       {"trace", to_json(res.trace)}}));
        }
    }
    write_file(dir / "traces" / "bootstrap.json", dump_canonical({{"scenario", "bootstrap"}, {"trace", to_json(r.bootstrap)}}));
    write_file(dir / "ffg.json", serialize(r.ffg));
    json bugs = json::array();
    for (const auto& b : r.bugs) bugs.push_back(to_json(b));
    write_file(dir / "bugs.json", dump_canonical({{"app", spec.name},
                                                  {"seed", cfg.seed},
                                                  {"duplicates_suppressed", r.duplicate_reports},
                                                  {"bugs", bugs}}));
    emit_metrics(r.metrics, dir / "metrics.csv");
    std::string log;
    for (const auto& l : r.log) log += l + "\n";
    write_file(dir / "run.log", log);
}

void log_failure(const RunConfig& cfg, const std::string& msg) {
    std::cerr << msg << "\n";
    if (cfg.out_dir.empty()) return;
    try {
        write_file(cfg.out_dir / "run.log", msg + "\n");
    } catch (const std::exception&) {
    }
}

}  // namespace

int run(const RunConfig& cfg) {
    std::shared_ptr<const AppSpec> spec;
    try {
        spec = std::make_shared<const AppSpec>(load_spec_file(cfg.app));
    } catch (const std::exception& e) {
        log_failure(cfg, std::string("spec error: ") + e.what());
        return 2;
    }
    for (const auto& d : cfg.disabled) {
        if (std::find(std::begin(kPhases), std::end(kPhases), d) == std::end(kPhases)) {
            log_failure(cfg, "unknown phase: " + d);
            return 2;
        }
    }
    RunResult r;
    try {
        r = run_loop(cfg, spec);
    } catch (const std::exception& e) {
        log_failure(cfg, std::string("invariant violation: ") + e.what());
        return 3;
    }
    if (!cfg.out_dir.empty()) {
        try {
            write_artifacts(cfg, *spec, r);
        } catch (const std::exception& e) {
            log_failure(cfg, std::string("output error: ") + e.what());
            return 3;
        }
    }
    return 0;
}

}  // namespace ffg
