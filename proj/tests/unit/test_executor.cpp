#include <gtest/gtest.h>

#include <regex>

#include "ffg/ltv_generator.hpp"
#include "support/brute.hpp"
#include "support/golden.hpp"

using namespace ffg;
namespace ts = testing_support;

namespace {

TEST(DedupKey, StableHex) {
    auto k = make_dedup_key("crash", "boom", "p");
    EXPECT_TRUE(std::regex_match(k, std::regex("[0-9a-f]{16}")));
    EXPECT_EQ(k, make_dedup_key("crash", "boom", "p"));
    EXPECT_NE(k, make_dedup_key("crash", "boom", "q"));
    // the separator keeps field boundaries apart
    EXPECT_NE(make_dedup_key("ab", "c", "p"), make_dedup_key("a", "bc", "p"));
}

struct Fixture {
    std::shared_ptr<const AppSpec> spec;
    FFG g;
    SpecOracle oracle;
    ScenarioExecutor ex;
    explicit Fixture(const std::string& app)
        : spec(ts::load(app)), g(ts::initial_graph(app)), ex(g, *spec, oracle) {}
};

TEST(CandidateActions, CoverInputValuesAndToggles) {
    auto spec = ts::load("todo");
    auto s = reset(spec, 1);
    auto acts = candidate_actions(s, "tasks");
    auto has = [&](const ActionStep& a) { return std::find(acts.begin(), acts.end(), a) != acts.end(); };
    EXPECT_TRUE(has({"tasks", "title", ActionKind::Input, "milk"}));
    EXPECT_TRUE(has({"tasks", "title", ActionKind::Input, "bread"}));
    EXPECT_TRUE(has({"tasks", "add", ActionKind::Click, ""}));
    s.perform({"tasks", "theme_btn", ActionKind::Click, ""});
    acts = candidate_actions(s, "theme");
    EXPECT_TRUE(has({"theme", "dark", ActionKind::ToggleOn, ""}));
    EXPECT_TRUE(has({"theme", "dark", ActionKind::ToggleOff, ""}));
}

TEST(Navigation, ReachesDeepPage) {
    Fixture f("blood_pressure");
    auto s = reset(f.spec, 1);
    auto path = f.ex.plan_navigation(s, {"remind_me"});
    ASSERT_TRUE(path);
    for (const auto& a : *path) ASSERT_TRUE(s.perform(a).ok()) << a.render();
    EXPECT_EQ(s.current_page(), "remind_me");
}

TEST(Establish, ReachesCondition) {
    Fixture f("blood_pressure_reference");
    auto s = reset(f.spec, 1);
    auto phi = Condition::parse("bmi@08:00 in alarm_list");
    bool reached = false;
    auto t = f.ex.establish_condition(s, phi, 60, &reached);
    EXPECT_TRUE(reached);
    EXPECT_TRUE(brute::holds(phi, s.valuation()));
    EXPECT_THROW(f.ex.establish_condition(s, Condition::falsity(), 60), Error);
}

TEST(Execute, CompletenessHitsWalletCrash) {
    Fixture f("wallet");
    bool crash = false;
    for (const auto& sc : gen_completeness(f.g, *f.spec, f.oracle)) {
        auto s = reset(f.spec, 1);
        auto r = f.ex.execute(sc, s, 60);
        EXPECT_LE(r.actions, 60u);
        for (const auto& rep : r.reports) crash = crash || rep.violation_kind == "crash_signal";
    }
    EXPECT_TRUE(crash);
}

TEST(Execute, BudgetIsRespected) {
    Fixture f("blood_pressure");
    for (const auto& sc : gen_completeness(f.g, *f.spec, f.oracle)) {
        auto s = reset(f.spec, 1);
        auto r = f.ex.execute(sc, s, 3);
        EXPECT_LE(r.actions, 3u);
    }
}

TEST(Execute, MalformedScenarioDoesNotRun) {
    Fixture f("blood_pressure");
    TestScenario sc{"x", ScenarioType::LTV, strategy::kCompleteness, "ghost", {ExecuteTrace{"ghost", "I"}}};
    auto s = reset(f.spec, 1);
    auto r = f.ex.execute(sc, s, 60);
    EXPECT_EQ(r.actions, 0u);
    EXPECT_FALSE(r.completed);
}

TEST(Detect, CrashAndToast) {
    Fixture f("shop");
    ExecStep st;
    st.step = {"product", "buy", ActionKind::Click, ""};
    st.outcome.status = StepStatus::Crashed;
    st.outcome.page_before = "product";
    st.outcome.events = {{Event::Crash, "Boom"}};
    auto reps = f.ex.detect(st, "s1");
    ASSERT_EQ(reps.size(), 1u);
    EXPECT_EQ(reps[0].kind, "crash");
    EXPECT_EQ(reps[0].page, "product");
    if (!f.spec->anomalous_toasts.empty()) {
        st.outcome.status = StepStatus::Ok;
        st.outcome.events = {{Event::Toast, f.spec->anomalous_toasts.front()}};
        reps = f.ex.detect(st, "s1");
        ASSERT_FALSE(reps.empty());
        EXPECT_EQ(reps[0].violation_kind, "toast_anomaly");
    }
}

}  // namespace
