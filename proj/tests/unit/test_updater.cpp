#include <gtest/gtest.h>

#include "ffg/updater.hpp"
#include "support/brute.hpp"
#include "support/golden.hpp"
#include "support/update_model.hpp"

using namespace ffg;
namespace ts = testing_support;

namespace {

TEST(UpdateFlows, RandomCasesMatchModel) {
    auto decls = brute::small_decls();
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        auto c = ts::random_update_case(seed, decls);
        auto why = ts::check_update_case(c, decls);
        ASSERT_TRUE(why.empty()) << "seed " << seed << ": " << why;
    }
}

TEST(UpdateFlows, RandomCasesReachEveryBranch) {
    auto decls = brute::small_decls();
    std::map<std::string, int> seen;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        auto c = ts::random_update_case(seed, decls);
        auto ops = update_flows(c.graph, c.cand, decls);
        if (ops.empty()) ++seen["noop"];
        for (const auto& op : ops) {
            ++seen[std::string(update_kind_name(op.kind))];
            if (op.kind == UpdateKind::FlowStrengthen && op.after.empty()) ++seen["deleted"];
        }
    }
    for (const char* k : {"noop", "flow_create", "flow_strengthen", "flow_weaken", "flow_merge"})
        EXPECT_GE(seen[k], 5) << k;
    // s && !phi is empty only when s |= phi, and with phi |= s that is the
    // equivalent case, which is left alone. So strengthening never deletes.
    EXPECT_EQ(seen["deleted"], 0);
}

TEST(UpdateFlows, CoveredCandidateIsNoop) {
    auto decls = brute::small_decls();
    auto g = ts::three_node_graph();
    auto id = g.add_flow("a", "I", Condition::parse("flag == true"), "b", "I");
    Flow cand{"", "a", "b", "I", Condition::parse("flag == true && mode == a"), "I"};
    auto ops = update_flows(g, cand, decls);
    EXPECT_TRUE(ops.empty());
    EXPECT_EQ(g.flows.at(id).phi.render(), "flag == true");
}

TEST(UpdateFlows, IncomparableMerges) {
    auto decls = brute::small_decls();
    auto g = ts::three_node_graph();
    auto id = g.add_flow("a", "I", Condition::parse("flag == true"), "b", "I");
    Flow cand{"", "a", "b", "I", Condition::parse("mode == a"), "I"};
    auto ops = update_flows(g, cand, decls);
    ASSERT_EQ(ops.size(), 1u);
    EXPECT_EQ(ops[0].kind, UpdateKind::FlowMerge);
    EXPECT_TRUE(equivalent(g.flows.at(id).phi, Condition::parse("flag == true || mode == a"), decls));
}

TEST(UpdateFlows, StrongerDivergentEvidenceNarrowsSibling) {
    auto decls = brute::small_decls();
    auto g = ts::three_node_graph();
    auto id = g.add_flow("a", "I", Condition::truth(), "b", "I");
    Flow cand{"", "a", "c", "I", Condition::parse("x in items"), "I"};
    auto ops = update_flows(g, cand, decls);
    ASSERT_EQ(ops.size(), 2u);
    EXPECT_EQ(ops[0].kind, UpdateKind::FlowStrengthen);
    EXPECT_EQ(ops[1].kind, UpdateKind::FlowCreate);
    EXPECT_EQ(g.flows.at(id).phi.render(), "x not in items");
}

TEST(UpdateFlows, EquivalentDivergentFlowsCoexist) {
    auto decls = brute::small_decls();
    auto g = ts::three_node_graph();
    g.add_flow("a", "I", Condition::parse("flag == true"), "b", "I");
    Flow cand{"", "a", "c", "I", Condition::parse("flag != false"), "I"};
    update_flows(g, cand, decls);
    EXPECT_EQ(g.flows.size(), 2u);
}

TEST(UpdateFunctionalities, ReplayedBootstrapSplitsMixedNode) {
    ExecutionTrace boot;
    auto g = ts::initial_graph("todo", &boot);
    auto spec = ts::load("todo");
    SpecOracle o;
    ASSERT_EQ(g.functionality("settings").traces.size(), 2u);
    std::vector<HomedSegment> homed;
    auto ops = update_functionalities(g, boot, *spec, o, UpdateThresholds{}, &homed);
    auto split = std::find_if(ops.begin(), ops.end(), [](const UpdateOp& op) { return op.kind == UpdateKind::NodeSplit; });
    ASSERT_NE(split, ops.end());
    EXPECT_EQ(split->before, std::vector<std::string>{"settings"});
    ASSERT_EQ(split->after.size(), 2u);
    EXPECT_EQ(g.functionality("settings").traces.size(), 1u);
    EXPECT_EQ(g.functionality(split->after[1]).traces.size(), 1u);
    EXPECT_NO_THROW(g.check_integrity());
    // the flow into the moved trace follows it
    bool repointed = false;
    for (const auto& [id, e] : g.flows) repointed = repointed || e.target == split->after[1];
    EXPECT_TRUE(repointed);
    for (const auto& h : homed) EXPECT_TRUE(g.has_functionality(h.home.func));
}

TEST(ApplyIteration, IdleReplayCountsNoMutations) {
    ExecutionTrace boot;
    auto g = ts::initial_graph("blood_pressure", &boot);
    auto spec = ts::load("blood_pressure");
    SpecOracle o;
    std::vector<ExecutionTrace> traces{boot};
    auto sum = apply_iteration(g, traces, *spec, o, UpdateThresholds{});
    EXPECT_EQ(sum.mutations, 0u);
    EXPECT_GT(sum.counts["node_merge"], 0u);
}

TEST(DeriveFlow, ConditionHoldsAtBoundary) {
    ExecutionTrace boot;
    auto g = ts::initial_graph("blood_pressure", &boot);
    auto spec = ts::load("blood_pressure");
    SpecOracle o;
    std::vector<HomedSegment> homed;
    update_functionalities(g, boot, *spec, o, UpdateThresholds{}, &homed);
    auto flows = derive_flow(boot, homed, g, o, *spec);
    ASSERT_EQ(flows.size(), 3u);
    EXPECT_EQ(flows[2].target, "alarm_management");
    for (std::size_t k = 0; k < flows.size(); ++k) {
        const auto& at = boot.steps[homed[k + 1].segment.indices.front()].outcome.state_before;
        EXPECT_TRUE(brute::holds(flows[k].phi, at)) << flows[k].phi.render();
    }
}

}  // namespace
