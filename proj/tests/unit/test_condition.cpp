#include <gtest/gtest.h>

#include "support/brute.hpp"

using namespace ffg;

namespace {

const auto kDecls = brute::small_decls();

TEST(ConditionParse, RoundTripsCanonicalText) {
    for (const char* text : {"true", "false", "flag == true", "x in items && mode != a",
                             "mode == b || x not in items && n == 2", "blood_sugar@08:00 not in alarm_list"}) {
        auto c = Condition::parse(text);
        EXPECT_EQ(Condition::parse(c.render()), c) << text;
        EXPECT_EQ(Condition::parse(c.render()).render(), c.render());
    }
}

TEST(ConditionParse, SortsAndDropsSubsumedClauses) {
    auto c = Condition::parse("mode == a && flag == true || mode == a");
    EXPECT_EQ(c.render(), "mode == a");
    auto d = Condition::parse("n == 1 && flag == true");
    auto e = Condition::parse("flag == true && n == 1");
    EXPECT_EQ(d, e);
}

TEST(ConditionParse, ContradictoryClauseDisappears) {
    EXPECT_TRUE(Condition::parse("mode == a && mode != a").is_false());
    EXPECT_TRUE(Condition::parse("x in items && x not in items || flag == true").render() == "flag == true");
}

TEST(ConditionParse, RejectsGarbage) {
    EXPECT_THROW(Condition::parse("mode =="), ConditionError);
    EXPECT_THROW(Condition::parse("mode == a &&"), ConditionError);
    EXPECT_THROW(Condition::parse("a b c"), ConditionError);
}

TEST(ConditionValidate, UnknownVariableAndOperand) {
    EXPECT_THROW(validate_condition(Condition::parse("ghost == a"), kDecls), UnboundVariableError);
    EXPECT_THROW(validate_condition(Condition::parse("mode == q"), kDecls), ConditionError);
    EXPECT_THROW(validate_condition(Condition::parse("a in mode"), kDecls), ConditionError);
    EXPECT_NO_THROW(validate_condition(Condition::parse("x in items || n == 2"), kDecls));
}

TEST(ConditionDecide, UnboundVariableThrows) {
    EXPECT_THROW(is_satisfiable(Condition::parse("ghost == a"), kDecls), UnboundVariableError);
}

TEST(ConditionDecide, CapExceededThrows) {
    std::vector<VarDecl> big;
    std::vector<Atom> atoms;
    for (int i = 0; i < 21; ++i) {
        big.push_back(VarDecl::boolean("b" + std::to_string(i)));
        atoms.push_back(eq("b" + std::to_string(i), "true"));
    }
    EXPECT_THROW(is_satisfiable(Condition::all_of(atoms), big), EnumerationCapError);
    atoms.pop_back();
    EXPECT_TRUE(is_satisfiable(Condition::all_of(atoms), big));
}

class ConditionProperty : public ::testing::TestWithParam<int> {};

TEST_P(ConditionProperty, OperationsAgreePointwise) {
    std::mt19937_64 rng(GetParam());
    for (int k = 0; k < 40; ++k) {
        auto a = brute::random_condition(rng, kDecls);
        auto b = brute::random_condition(rng, kDecls);
        auto na = negate(a), ab = conjoin(a, b), aob = disjoin(a, b), anb = conjoin_negation(a, b);
        brute::for_each(kDecls, [&](const Valuation& v) {
            bool x = brute::holds(a, v), y = brute::holds(b, v);
            ASSERT_EQ(evaluate(a, v), x);
            ASSERT_EQ(brute::holds(na, v), !x) << a.render();
            ASSERT_EQ(brute::holds(ab, v), x && y);
            ASSERT_EQ(brute::holds(aob, v), x || y);
            ASSERT_EQ(brute::holds(anb, v), x && !y);
        });
    }
}

TEST_P(ConditionProperty, DecisionsMatchBruteForce) {
    std::mt19937_64 rng(1000 + GetParam());
    for (int k = 0; k < 40; ++k) {
        auto a = brute::random_condition(rng, kDecls);
        auto b = brute::random_condition(rng, kDecls);
        for (auto pol : {ExecPolicy::Serial, ExecPolicy::Parallel}) {
            ASSERT_EQ(is_satisfiable(a, kDecls, pol), brute::sat(a, kDecls)) << a.render();
            ASSERT_EQ(entails(a, b, kDecls, pol), brute::entails(a, b, kDecls)) << a.render() << " |= " << b.render();
            ASSERT_EQ(equivalent(a, b, kDecls, pol), brute::equiv(a, b, kDecls));
        }
    }
}

// Parts may overlap; together they cover the condition exactly.
TEST_P(ConditionProperty, PartitionCoversCondition) {
    std::mt19937_64 rng(2000 + GetParam());
    for (int k = 0; k < 20; ++k) {
        auto c = brute::random_condition(rng, kDecls);
        auto parts = partition_disjuncts(c);
        brute::for_each(kDecls, [&](const Valuation& v) {
            int hits = 0;
            for (const auto& p : parts) hits += brute::holds(p, v);
            ASSERT_EQ(hits > 0, brute::holds(c, v)) << c.render();
        });
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ConditionProperty, ::testing::Range(1, 6));

TEST(ConditionViolation, EachTargetFlipsExactlyOneLiteral) {
    auto c = Condition::parse("flag == true && mode == b && x in items");
    const auto& clause = c.clauses().front();
    auto targets = minimal_violation_targets(clause);
    ASSERT_EQ(targets.size(), 3u);
    for (const auto& t : targets) {
        brute::for_each(kDecls, [&](const Valuation& v) {
            if (!brute::holds(t.condition, v)) return;
            int unmet = 0;
            for (const auto& a : clause.literals) unmet += !brute::holds(a, v);
            ASSERT_EQ(unmet, 1);
            ASSERT_FALSE(brute::holds(t.literal, v));
        });
    }
}

TEST(ConditionOverlap, ReportsOverlappingDisjuncts) {
    auto c = Condition::parse("mode == a || flag == true || mode == b && flag == false");
    auto pairs = overlapping_disjuncts(c, kDecls);
    // mode == a overlaps flag == true; the third clause overlaps neither
    for (auto [i, j] : pairs) {
        auto ci = Condition::from_clauses({c.clauses()[i]});
        auto cj = Condition::from_clauses({c.clauses()[j]});
        EXPECT_TRUE(brute::sat(conjoin(ci, cj), kDecls));
    }
    EXPECT_EQ(pairs.size(), 1u);
}

}  // namespace
