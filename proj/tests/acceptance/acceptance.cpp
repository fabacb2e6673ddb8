// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "ffg/ffg_io.hpp"
#include "ffg/harness.hpp"
#include "ffg/stv_generator.hpp"
#include "support/brute.hpp"
#include "support/golden.hpp"
#include "support/matching.hpp"
#include "support/update_model.hpp"

using namespace ffg;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

// Pinned limits
constexpr double kInitSeconds = 1.0;
constexpr double kRunSeconds = 10.0;
constexpr double kOracleSeconds = 5.0;
constexpr int kConditionPairs = 1000;
constexpr int kUpdateCases = 500;
constexpr std::size_t kActions = 500;
constexpr std::size_t kIterations = 6;

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
    std::cout << "criterion " << n << " " << (ok ? "PASS" : "FAIL") << " " << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << s << "s";
    return os.str();
}

RunConfig full(const std::string& app) {
    RunConfig c;
    c.app = ts::corpus_path(app);
    c.seed = 1;
    c.max_actions = kActions;
    c.max_iterations = kIterations;
    return c;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("ffg-acceptance-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

const Flow* refined_flow(const FFG& g) {
    for (const auto& [id, e] : g.flows)
        if (e.source == "app_navigation" && e.target == "blood_sugar_editing" && e.pi_prime == "I") return &e;
    return nullptr;
}

const InjectedBug* bug_named(const AppSpec& spec, const std::string& id) {
    for (const auto& b : spec.injected_bugs)
        if (b.id == id) return &b;
    return nullptr;
}

void initialization() {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = ts::load("blood_pressure");
    auto got = ts::initial_graph("blood_pressure");
    double dt = seconds_since(t0);
    auto diffs = ts::diff_graphs(got, ts::golden("blood_pressure_init.ffg"), spec->var_decls);
    bool all_true = true;
    for (const auto& [id, e] : got.flows) all_true = all_true && e.phi.is_true();
    bool ok = diffs.empty() && all_true && got.functionalities.size() == 3 && dt < kInitSeconds;
    report(1, "initialization", ok,
           (diffs.empty() ? std::string("golden match") : "diff " + diffs.front()) + ", " + fmt(dt));
}

void motivating_run() {
    auto spec = ts::load("blood_pressure");
    auto cfg = full("blood_pressure");
    cfg.out_dir = scratch("bp");
    auto t0 = std::chrono::steady_clock::now();
    int rc = run(cfg);
    double dt = seconds_since(t0);
    if (rc != 0) {
        report(2, "motivating bugs", false, "run exited " + std::to_string(rc));
        report(3, "condition refinement", false, "run exited " + std::to_string(rc));
        return;
    }
    auto* b1 = bug_named(*spec, "alarm-type-mismatch");
    auto* b2 = bug_named(*spec, "time-repeat-after-delete");
    auto doc = json::parse(read_file(cfg.out_dir / "bugs.json"));
    std::vector<BugReport> reps;
    for (const auto& b : doc.at("bugs")) {
        BugReport r;
        r.kind = b.at("kind");
        r.page = b.at("page");
        r.violation = b.at("violation");
        reps.push_back(r);
    }
    std::size_t h1 = b1 ? ts::hits(reps, *b1) : 0, h2 = b2 ? ts::hits(reps, *b2) : 0;
    report(2, "motivating bugs", h1 == 1 && h2 == 1 && dt < kRunSeconds,
           "bug1 x" + std::to_string(h1) + ", bug2 x" + std::to_string(h2) + ", " + std::to_string(reps.size()) +
               " unique reports, " + fmt(dt));

    auto g = deserialize(read_file(cfg.out_dir / "ffg.json"));
    auto* e = refined_flow(g);
    auto want = Condition::parse("blood_sugar@08:00 not in alarm_list");
    bool ok = e && equivalent(e->phi, want, spec->var_decls) && brute::equiv(e->phi, want, spec->var_decls);
    report(3, "condition refinement", ok, e ? e->id + " = " + e->phi.render() : "no such flow");
}

void oracle_equivalence() {
    // four variables, every domain of size <= 3
    std::vector<VarDecl> decls{VarDecl::boolean("flag"), VarDecl::enumeration("mode", {"a", "b", "c"}),
                               VarDecl::int_range("n", 0, 2), VarDecl::set_of("items", {"x"})};
    std::mt19937_64 rng(20240611);
    int agree = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < kConditionPairs; ++k) {
        auto a = brute::random_condition(rng, decls);
        auto b = brute::random_condition(rng, decls);
        bool ok = is_satisfiable(a, decls) == brute::sat(a, decls) && entails(a, b, decls) == brute::entails(a, b, decls) &&
                  is_satisfiable(a, decls, ExecPolicy::Serial) == brute::sat(a, decls);
        auto cn = conjoin_negation(a, b);
        auto dj = disjoin(a, b);
        brute::for_each(decls, [&](const Valuation& v) {
            bool x = brute::holds(a, v), y = brute::holds(b, v);
            ok = ok && brute::holds(cn, v) == (x && !y) && brute::holds(dj, v) == (x || y);
        });
        agree += ok;
    }
    double dt = seconds_since(t0);
    report(4, "entailment oracle", agree == kConditionPairs && dt < kOracleSeconds,
           std::to_string(agree) + "/" + std::to_string(kConditionPairs) + " agree, " + fmt(dt));
}

void update_properties() {
    auto decls = brute::small_decls();
    int ok = 0;
    std::string first;
    for (int k = 1; k <= kUpdateCases; ++k) {
        auto c = ts::random_update_case(static_cast<std::uint64_t>(k), decls);
        auto why = ts::check_update_case(c, decls) + ts::check_update_properties(c, decls);
        if (why.empty()) ++ok;
        else if (first.empty()) first = "case " + std::to_string(k) + ": " + why;
    }
    report(5, "update rules", ok == kUpdateCases,
           std::to_string(ok) + "/" + std::to_string(kUpdateCases) + (first.empty() ? "" : ", " + first));
}

// Runs every single-flow scenario of `g` on the twin; counts the bad ones.
std::size_t bad_variants(const FFG& g, std::shared_ptr<const AppSpec> spec, std::size_t& total) {
    SpecOracle oracle;
    ScenarioExecutor ex(g, *spec, oracle);
    std::size_t bad = 0;
    for (const auto& [id, e] : g.flows) {
        for (const auto& sc : gen_single_flow(e, g, reset(spec, 1))) {
            ++total;
            auto s = reset(spec, 1);
            auto r = ex.execute(sc, s, 60);
            bool ok = r.completed && r.reports.empty();
            bool enabled = false;
            for (const auto& st : r.trace.steps) {
                if (st.origin != StepOrigin::Plan) continue;
                ok = ok && st.outcome.ok();
                enabled = enabled || st.plan_index == 1;
            }
            bad += !(ok && enabled);
        }
    }
    return bad;
}

void mr_soundness() {
    auto spec = ts::load("blood_pressure_reference");
    std::size_t total = 0, bad = 0;
    bad += bad_variants(ts::initial_graph("blood_pressure_reference"), spec, total);
    auto r = run_loop(full("blood_pressure_reference"), spec);
    bad += bad_variants(r.ffg, spec, total);
    std::size_t reports = 0;
    std::string noisy;
    for (const char* app : ts::kApps) {
        std::string twin = std::string(app) + "_reference";
        auto rr = run_loop(full(twin), ts::load(twin));
        reports += rr.bugs.size();
        if (!rr.bugs.empty()) noisy += " " + twin;
    }
    report(6, "MR soundness", total > 0 && bad == 0 && reports == 0,
           std::to_string(total - bad) + "/" + std::to_string(total) + " variants ok, " + std::to_string(reports) +
               " reports on twins" + noisy);
}

void ablations() {
    auto spec = ts::load("blood_pressure");
    auto* b1 = bug_named(*spec, "alarm-type-mismatch");
    auto* b2 = bug_named(*spec, "time-repeat-after-delete");
    auto cfg = full("blood_pressure");
    cfg.disabled = {"stv-cross"};
    auto r = run_loop(cfg, spec);
    std::size_t h1 = b1 ? ts::hits(r.bugs, *b1) : 0, h2 = b2 ? ts::hits(r.bugs, *b2) : 0;
    cfg.disabled = {"ltv-flow"};
    auto q = run_loop(cfg, spec);
    auto* e = refined_flow(q.ffg);
    bool still_true = e && e->phi.is_true();
    report(7, "ablation direction", h1 >= 1 && h2 == 0 && still_true,
           "w/o stv-cross: bug1 x" + std::to_string(h1) + ", bug2 x" + std::to_string(h2) +
               "; w/o ltv-flow: " + (e ? e->phi.render() : std::string("flow missing")));
}

void determinism() {
    std::vector<std::string> differ;
    for (int jobs : {1, 3}) {
        auto a = full("blood_pressure"), b = full("blood_pressure");
        a.out_dir = scratch("det-a");
        b.out_dir = scratch("det-b");
        b.jobs = jobs;
        if (run(a) != 0 || run(b) != 0) {
            differ.push_back("run failed");
            break;
        }
        for (const char* f : {"bugs.json", "ffg.json", "metrics.csv"})
            if (read_file(a.out_dir / f) != read_file(b.out_dir / f))
                differ.push_back(std::string(f) + " (jobs " + std::to_string(jobs) + ")");
    }
    std::string d;
    for (const auto& x : differ) d += " " + x;
    report(8, "determinism", differ.empty(), differ.empty() ? "byte-identical, also with --jobs 3" : "differs:" + d);
}

void corpus_breadth() {
    const std::vector<std::string> all = {
        strategy::kCompleteness, strategy::kIndependence,  strategy::kPartition,   strategy::kMinimalViolation,
        strategy::kInvariant,    strategy::kHideShow,      strategy::kChangeOrder, strategy::kToggle,
        strategy::kCreateDelete, strategy::kModifyAttribute, strategy::kConsumeProduce};
    std::set<std::string> ran;
    std::string missing_bugs;
    std::size_t apps = 0;
    for (const char* app : ts::kApps) {
        if (!fs::exists(ts::corpus_path(std::string(app) + "_reference"))) continue;
        auto spec = ts::load(app);
        auto r = run_loop(full(app), spec);
        ++apps;
        bool found = !spec->injected_bugs.empty();
        for (const auto& b : spec->injected_bugs) found = found && ts::hits(r.bugs, b) >= 1;
        if (!found) missing_bugs += std::string(" ") + app;
        for (const auto& it : r.iterations) {
            std::set<std::string> done;
            for (const auto& res : it.results) done.insert(res.scenario_id);
            for (const auto& s : it.scenarios)
                if (done.contains(s.id)) ran.insert(s.strategy);
        }
    }
    std::string gaps;
    for (const auto& s : all)
        if (!ran.contains(s)) gaps += " " + s;
    report(9, "corpus breadth", apps >= 5 && gaps.empty() && missing_bugs.empty(),
           std::to_string(apps) + " apps with twins, " + std::to_string(ran.size()) + "/" + std::to_string(all.size()) +
               " strategies executed" + (gaps.empty() ? "" : ", never ran:" + gaps) +
               (missing_bugs.empty() ? ", every injected bug found" : ", bugs missed in:" + missing_bugs));
}

}  // namespace

int main() {
    std::vector<std::function<void()>> steps{initialization, motivating_run, oracle_equivalence, update_properties,
                                             mr_soundness,   ablations,      determinism,        corpus_breadth};
    for (auto& s : steps) {
        try {
            s();
        } catch (const std::exception& e) {
            std::cout << "criterion ? FAIL exception: " << e.what() << std::endl;
            ++failures;
        }
    }
    fs::remove_all(fs::temp_directory_path() / ("ffg-acceptance-" + std::to_string(::getpid())));
    std::cout << (failures ? "acceptance: FAIL" : "acceptance: all criteria pass") << std::endl;
    return failures ? 1 : 0;
}
