#pragma once

// App-state conditions in disjunctive normal form.
//
// A Condition is a disjunction of Clauses, each Clause a conjunction of
// Atoms over finite-domain state variables. Conditions are always kept in
// canonical form: literals sorted inside a clause, clauses sorted, and
// subsumed or syntactically contradictory clauses dropped. Two normalized
// conditions that compare equal are logically equivalent (the converse
// does not hold; use equivalent() for that).
//
// Text grammar (canonical renderer and parser round-trip bit-exactly):
//
//   cond   := "true" | "false" | clause ( " || " clause )*
//   clause := atom ( " && " atom )*
//   atom   := var "==" lit | var "!=" lit | lit "in" var | lit "not" "in" var
//
// Literals are bare tokens over [A-Za-z0-9_@:.-] or double-quoted strings.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ffg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConditionError : public Error {
public:
    using Error::Error;
};

class UnboundVariableError : public ConditionError {
public:
    explicit UnboundVariableError(std::string var)
        : ConditionError("unbound variable '" + var + "'"), var_(std::move(var)) {}
    const std::string& variable() const { return var_; }

private:
    std::string var_;
};

class EnumerationCapError : public Error {
public:
    explicit EnumerationCapError(std::uint64_t space)
        : Error("assignment space of " + std::to_string(space) + " exceeds the enumeration cap of " +
                std::to_string(kCap)),
          space_(space) {}
    std::uint64_t space() const { return space_; }

    static constexpr std::uint64_t kCap = std::uint64_t{1} << 20;

private:
    std::uint64_t space_;
};

enum class DomainKind { Boolean, Enum, IntRange, SetOf };

struct VarDecl {
    std::string name;
    DomainKind kind = DomainKind::Boolean;
    std::vector<std::string> labels;  // enum labels or set universe, deduplicated
    int lo = 0;
    int hi = 0;

    static VarDecl boolean(std::string name);
    static VarDecl enumeration(std::string name, std::vector<std::string> labels);
    static VarDecl int_range(std::string name, int lo, int hi);
    static VarDecl set_of(std::string name, std::vector<std::string> universe);

    bool is_set() const { return kind == DomainKind::SetOf; }
    std::vector<std::string> scalar_values() const;
    std::size_t scalar_count() const;
    int scalar_index(std::string_view value) const;   // -1 when outside the domain
    int element_index(std::string_view elem) const;   // -1 when outside the universe
    std::uint64_t domain_size() const;                // saturates at UINT64_MAX
};

const VarDecl* find_decl(std::span<const VarDecl> decls, std::string_view name);

/// Product of the domain sizes of all declarations (saturating).
std::uint64_t assignment_space_size(std::span<const VarDecl> decls);

using ElementSet = std::set<std::string>;
using Value = std::variant<std::string, ElementSet>;
using Valuation = std::map<std::string, Value>;

bool value_in_domain(const VarDecl& decl, const Value& value);
std::string render_value(const Value& value);

enum class Predicate { Eq, Neq, Contains, NotContains };

std::string_view predicate_name(Predicate p);

struct Atom {
    std::string var;
    Predicate pred = Predicate::Eq;
    std::string operand;

    Atom negated() const;
    std::string render() const;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

inline Atom eq(std::string var, std::string v) { return {std::move(var), Predicate::Eq, std::move(v)}; }
inline Atom neq(std::string var, std::string v) { return {std::move(var), Predicate::Neq, std::move(v)}; }
inline Atom contains(std::string var, std::string e) {
    return {std::move(var), Predicate::Contains, std::move(e)};
}
inline Atom not_contains(std::string var, std::string e) {
    return {std::move(var), Predicate::NotContains, std::move(e)};
}

struct Clause {
    std::vector<Atom> literals;

    std::string render() const;
    friend bool operator==(const Clause&, const Clause&) = default;
    friend auto operator<=>(const Clause&, const Clause&) = default;
};

class Condition {
public:
    /// Default-constructed condition is True.
    Condition();

    static Condition truth();
    static Condition falsity();
    static Condition of(Atom atom);
    static Condition all_of(std::vector<Atom> atoms);
    static Condition from_clauses(std::vector<Clause> clauses);
    static Condition parse(std::string_view text);

    bool is_true() const;
    bool is_false() const { return clauses_.empty(); }
    const std::vector<Clause>& clauses() const { return clauses_; }

    std::set<std::string> variables() const;
    bool mentions(std::string_view var) const;
    std::string render() const;

    friend bool operator==(const Condition&, const Condition&) = default;

private:
    std::vector<Clause> clauses_;
};

/// Sorts and deduplicates literals; nullopt when the clause is syntactically contradictory.
std::optional<Clause> normalize_clause(Clause clause);

bool evaluate(const Atom& atom, const Valuation& val);
bool evaluate(const Clause& clause, const Valuation& val);
bool evaluate(const Condition& cond, const Valuation& val);

Condition conjoin(const Condition& a, const Condition& b);
Condition negate(const Condition& c);
Condition conjoin_negation(const Condition& a, const Condition& b);
Condition disjoin(const Condition& a, const Condition& b);

std::vector<Condition> partition_disjuncts(const Condition& cond);

struct ViolationTarget {
    Atom literal;
    Condition condition;
};

std::vector<ViolationTarget> minimal_violation_targets(const Clause& clause);

/// Checks atom kinds and operands against the declarations.
void validate_condition(const Condition& cond, std::span<const VarDecl> decls);

// Decision procedures, exhaustive over the variables the conditions mention.
enum class ExecPolicy { Serial, Parallel };

bool is_satisfiable(const Condition& cond, std::span<const VarDecl> decls,
                    ExecPolicy policy = ExecPolicy::Parallel);
bool entails(const Condition& a, const Condition& b, std::span<const VarDecl> decls,
             ExecPolicy policy = ExecPolicy::Parallel);
bool equivalent(const Condition& a, const Condition& b, std::span<const VarDecl> decls,
                ExecPolicy policy = ExecPolicy::Parallel);

/// Index pairs of disjuncts whose models overlap.
std::vector<std::pair<std::size_t, std::size_t>> overlapping_disjuncts(const Condition& cond,
                                                                       std::span<const VarDecl> decls);

}  // namespace ffg
