#pragma once

// Brute-force reference for condition semantics. Enumerates valuations by
// plain recursion and evaluates atoms directly, sharing nothing with the
// library's kernels or evaluator.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ffg/condition.hpp"

namespace brute {

using ffg::Condition;
using ffg::DomainKind;
using ffg::ElementSet;
using ffg::Valuation;
using ffg::VarDecl;

inline std::vector<ffg::Value> domain(const VarDecl& d) {
    std::vector<ffg::Value> out;
    switch (d.kind) {
        case DomainKind::Boolean: out = {std::string("false"), std::string("true")}; break;
        case DomainKind::Enum:
            for (const auto& l : d.labels) out.emplace_back(l);
            break;
        case DomainKind::IntRange:
            for (int i = d.lo; i <= d.hi; ++i) out.emplace_back(std::to_string(i));
            break;
        case DomainKind::SetOf: {
            std::size_t n = d.labels.size();
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                ElementSet s;
                for (std::size_t b = 0; b < n; ++b)
                    if (mask >> b & 1) s.insert(d.labels[b]);
                out.emplace_back(s);
            }
            break;
        }
    }
    return out;
}

inline void for_each(const std::vector<VarDecl>& decls, const std::function<void(const Valuation&)>& fn) {
    Valuation v;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == decls.size()) return fn(v);
        for (auto& x : domain(decls[i])) {
            v[decls[i].name] = x;
            rec(i + 1);
        }
    };
    rec(0);
}

inline bool holds(const ffg::Atom& a, const Valuation& v) {
    const auto& val = v.at(a.var);
    switch (a.pred) {
        case ffg::Predicate::Eq: return std::get<std::string>(val) == a.operand;
        case ffg::Predicate::Neq: return std::get<std::string>(val) != a.operand;
        case ffg::Predicate::Contains: return std::get<ElementSet>(val).contains(a.operand);
        case ffg::Predicate::NotContains: return !std::get<ElementSet>(val).contains(a.operand);
    }
    return false;
}

inline bool holds(const Condition& c, const Valuation& v) {
    for (const auto& cl : c.clauses()) {
        bool all = true;
        for (const auto& a : cl.literals) all = all && holds(a, v);
        if (all) return true;
    }
    return false;
}

inline bool sat(const Condition& c, const std::vector<VarDecl>& d) {
    bool any = false;
    for_each(d, [&](const Valuation& v) { any = any || holds(c, v); });
    return any;
}

inline bool entails(const Condition& a, const Condition& b, const std::vector<VarDecl>& d) {
    bool ok = true;
    for_each(d, [&](const Valuation& v) { ok = ok && (!holds(a, v) || holds(b, v)); });
    return ok;
}

inline bool equiv(const Condition& a, const Condition& b, const std::vector<VarDecl>& d) {
    return entails(a, b, d) && entails(b, a, d);
}

// Small mixed domain: 2 * 3 * 3 * 8 = 144 valuations.
inline std::vector<VarDecl> small_decls() {
    return {VarDecl::boolean("flag"), VarDecl::enumeration("mode", {"a", "b", "c"}),
            VarDecl::int_range("n", 0, 2), VarDecl::set_of("items", {"x", "y", "z"})};
}

inline ffg::Atom random_atom(std::mt19937_64& rng, const std::vector<VarDecl>& decls) {
    const auto& d = decls[rng() % decls.size()];
    if (d.is_set()) {
        const auto& e = d.labels[rng() % d.labels.size()];
        return rng() % 2 ? ffg::contains(d.name, e) : ffg::not_contains(d.name, e);
    }
    auto vals = d.scalar_values();
    const auto& x = vals[rng() % vals.size()];
    return rng() % 2 ? ffg::eq(d.name, x) : ffg::neq(d.name, x);
}

inline Condition random_condition(std::mt19937_64& rng, const std::vector<VarDecl>& decls) {
    std::vector<ffg::Clause> clauses;
    std::size_t nc = 1 + rng() % 3;
    for (std::size_t i = 0; i < nc; ++i) {
        ffg::Clause cl;
        std::size_t na = 1 + rng() % 3;
        for (std::size_t j = 0; j < na; ++j) cl.literals.push_back(random_atom(rng, decls));
        clauses.push_back(cl);
    }
    if (rng() % 16 == 0) return Condition::truth();
    return Condition::from_clauses(clauses);
}

}  // namespace brute
