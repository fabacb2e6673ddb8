#include "ffg/condition.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "ffg/enumeration.hpp"

namespace ffg {

namespace {

std::vector<std::string> dedup_keep_order(std::vector<std::string> in) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& s : in) {
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == ':' || c == '.' ||
           c == '-';
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string render_literal(std::string_view lit) {
    bool bare = !lit.empty() && std::all_of(lit.begin(), lit.end(), is_bare_char) && lit != "in" &&
                lit != "not";
    if (bare) return std::string(lit);
    std::string out = "\"";
    for (char c : lit) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Declarations and values

VarDecl VarDecl::boolean(std::string name) {
    VarDecl d;
    d.name = std::move(name);
    d.kind = DomainKind::Boolean;
    return d;
}

VarDecl VarDecl::enumeration(std::string name, std::vector<std::string> labels) {
    VarDecl d;
    d.name = std::move(name);
    d.kind = DomainKind::Enum;
    d.labels = dedup_keep_order(std::move(labels));
    if (d.labels.empty()) throw ConditionError("enum variable '" + d.name + "' has an empty label set");
    return d;
}

VarDecl VarDecl::int_range(std::string name, int lo, int hi) {
    if (lo > hi) throw ConditionError("int range for '" + name + "' has lo > hi");
    VarDecl d;
    d.name = std::move(name);
    d.kind = DomainKind::IntRange;
    d.lo = lo;
    d.hi = hi;
    return d;
}

VarDecl VarDecl::set_of(std::string name, std::vector<std::string> universe) {
    VarDecl d;
    d.name = std::move(name);
    d.kind = DomainKind::SetOf;
    d.labels = dedup_keep_order(std::move(universe));
    if (d.labels.empty()) throw ConditionError("set variable '" + d.name + "' has an empty universe");
    if (d.labels.size() > 31) throw ConditionError("set variable '" + d.name + "' universe exceeds 31 elements");
    return d;
}

std::vector<std::string> VarDecl::scalar_values() const {
    switch (kind) {
        case DomainKind::Boolean:
            return {"false", "true"};
        case DomainKind::Enum:
            return labels;
        case DomainKind::IntRange: {
            std::vector<std::string> out;
            for (int v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
            return out;
        }
        case DomainKind::SetOf:
            return {};
    }
    return {};
}

std::size_t VarDecl::scalar_count() const {
    switch (kind) {
        case DomainKind::Boolean:
            return 2;
        case DomainKind::Enum:
            return labels.size();
        case DomainKind::IntRange:
            return static_cast<std::size_t>(static_cast<long long>(hi) - lo + 1);
        case DomainKind::SetOf:
            return 0;
    }
    return 0;
}

int VarDecl::scalar_index(std::string_view value) const {
    switch (kind) {
        case DomainKind::Boolean:
            if (value == "false") return 0;
            if (value == "true") return 1;
            return -1;
        case DomainKind::Enum: {
            auto it = std::find(labels.begin(), labels.end(), value);
            return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
        }
        case DomainKind::IntRange: {
            if (value.empty()) return -1;
            try {
                std::size_t pos = 0;
                long long v = std::stoll(std::string(value), &pos);
                if (pos != value.size() || v < lo || v > hi) return -1;
                if (std::to_string(v) != value) return -1;
                return static_cast<int>(v - lo);
            } catch (const std::exception&) {
                return -1;
            }
        }
        case DomainKind::SetOf:
            return -1;
    }
    return -1;
}

int VarDecl::element_index(std::string_view elem) const {
    if (kind != DomainKind::SetOf) return -1;
    auto it = std::find(labels.begin(), labels.end(), elem);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

std::uint64_t VarDecl::domain_size() const {
    if (kind == DomainKind::SetOf) return std::uint64_t{1} << labels.size();
    return scalar_count();
}

const VarDecl* find_decl(std::span<const VarDecl> decls, std::string_view name) {
    for (const auto& d : decls) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

std::uint64_t assignment_space_size(std::span<const VarDecl> decls) {
    std::uint64_t total = 1;
    for (const auto& d : decls) {
        std::uint64_t s = d.domain_size();
        if (s != 0 && total > std::numeric_limits<std::uint64_t>::max() / s) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= s;
    }
    return total;
}

bool value_in_domain(const VarDecl& decl, const Value& value) {
    if (decl.is_set()) {
        const auto* set = std::get_if<ElementSet>(&value);
        if (!set) return false;
        return std::all_of(set->begin(), set->end(),
                           [&](const std::string& e) { return decl.element_index(e) >= 0; });
    }
    const auto* scalar = std::get_if<std::string>(&value);
    return scalar && decl.scalar_index(*scalar) >= 0;
}

std::string render_value(const Value& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    std::string out = "{";
    bool first = true;
    for (const auto& e : std::get<ElementSet>(value)) {
        if (!first) out += ", ";
        out += e;
        first = false;
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Atoms and clauses

std::string_view predicate_name(Predicate p) {
    switch (p) {
        case Predicate::Eq:
            return "eq";
        case Predicate::Neq:
            return "neq";
        case Predicate::Contains:
            return "contains";
        case Predicate::NotContains:
            return "not_contains";
    }
    return "?";
}

Atom Atom::negated() const {
    switch (pred) {
        case Predicate::Eq:
            return {var, Predicate::Neq, operand};
        case Predicate::Neq:
            return {var, Predicate::Eq, operand};
        case Predicate::Contains:
            return {var, Predicate::NotContains, operand};
        case Predicate::NotContains:
            return {var, Predicate::Contains, operand};
    }
    return *this;
}

std::string Atom::render() const {
    switch (pred) {
        case Predicate::Eq:
            return var + " == " + render_literal(operand);
        case Predicate::Neq:
            return var + " != " + render_literal(operand);
        case Predicate::Contains:
            return render_literal(operand) + " in " + var;
        case Predicate::NotContains:
            return render_literal(operand) + " not in " + var;
    }
    return {};
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.var <=> b.var; c != 0) return c;
    if (auto c = static_cast<int>(a.pred) <=> static_cast<int>(b.pred); c != 0) return c;
    if (auto c = render_literal(a.operand) <=> render_literal(b.operand); c != 0) return c;
    return a.operand <=> b.operand;
}

std::string Clause::render() const {
    std::string out;
    for (std::size_t i = 0; i < literals.size(); ++i) {
        if (i) out += " && ";
        out += literals[i].render();
    }
    return out;
}

std::optional<Clause> normalize_clause(Clause clause) {
    auto& lits = clause.literals;
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());

    std::map<std::string, std::string> eq_of;
    for (const auto& a : lits) {
        if (a.pred != Predicate::Eq) continue;
        auto [it, inserted] = eq_of.emplace(a.var, a.operand);
        if (!inserted && it->second != a.operand) return std::nullopt;
    }
    std::vector<Atom> kept;
    for (const auto& a : lits) {
        if (a.pred == Predicate::Neq) {
            auto it = eq_of.find(a.var);
            if (it != eq_of.end()) {
                if (it->second == a.operand) return std::nullopt;
                continue;  // implied by the eq literal
            }
        }
        if (a.pred == Predicate::Contains &&
            std::binary_search(lits.begin(), lits.end(), a.negated())) {
            return std::nullopt;
        }
        kept.push_back(a);
    }
    lits = std::move(kept);
    return clause;
}

// ---------------------------------------------------------------------------
// Condition

Condition::Condition() : clauses_{Clause{}} {}

Condition Condition::truth() { return Condition(); }

Condition Condition::falsity() {
    Condition c;
    c.clauses_.clear();
    return c;
}

Condition Condition::of(Atom atom) { return all_of({std::move(atom)}); }

Condition Condition::all_of(std::vector<Atom> atoms) { return from_clauses({Clause{std::move(atoms)}}); }

Condition Condition::from_clauses(std::vector<Clause> clauses) {
    std::vector<Clause> norm;
    norm.reserve(clauses.size());
    for (auto& c : clauses) {
        if (auto n = normalize_clause(std::move(c))) norm.push_back(std::move(*n));
    }
    std::sort(norm.begin(), norm.end());
    norm.erase(std::unique(norm.begin(), norm.end()), norm.end());

    // Drop clauses subsumed by a (strictly) smaller literal set.
    std::vector<Clause> kept;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        bool subsumed = false;
        for (std::size_t j = 0; j < norm.size() && !subsumed; ++j) {
            if (i == j || norm[j].literals.size() >= norm[i].literals.size()) continue;
            subsumed = std::includes(norm[i].literals.begin(), norm[i].literals.end(), norm[j].literals.begin(),
                                     norm[j].literals.end());
        }
        if (!subsumed) kept.push_back(norm[i]);
    }
    Condition out;
    out.clauses_ = std::move(kept);
    return out;
}

bool Condition::is_true() const { return clauses_.size() == 1 && clauses_.front().literals.empty(); }

std::set<std::string> Condition::variables() const {
    std::set<std::string> out;
    for (const auto& c : clauses_) {
        for (const auto& a : c.literals) out.insert(a.var);
    }
    return out;
}

bool Condition::mentions(std::string_view var) const {
    for (const auto& c : clauses_) {
        for (const auto& a : c.literals) {
            if (a.var == var) return true;
        }
    }
    return false;
}

std::string Condition::render() const {
    if (is_false()) return "false";
    if (is_true()) return "true";
    std::string out;
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
        if (i) out += " || ";
        out += clauses_[i].render();
    }
    return out;
}

namespace {

struct Token {
    enum Kind { Word, Quoted, AndOp, OrOp, EqOp, NeqOp } kind;
    std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (s.substr(i, 2) == "&&") {
            out.push_back({Token::AndOp, "&&"});
            i += 2;
        } else if (s.substr(i, 2) == "||") {
            out.push_back({Token::OrOp, "||"});
            i += 2;
        } else if (s.substr(i, 2) == "==") {
            out.push_back({Token::EqOp, "=="});
            i += 2;
        } else if (s.substr(i, 2) == "!=") {
            out.push_back({Token::NeqOp, "!="});
            i += 2;
        } else if (c == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < s.size()) {
                if (s[i] == '\\' && i + 1 < s.size()) {
                    text.push_back(s[i + 1]);
                    i += 2;
                } else if (s[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    text.push_back(s[i++]);
                }
            }
            if (!closed) throw ConditionError("unterminated string literal in condition");
            out.push_back({Token::Quoted, std::move(text)});
        } else if (is_bare_char(c)) {
            std::size_t j = i;
            while (j < s.size() && is_bare_char(s[j])) ++j;
            out.push_back({Token::Word, std::string(s.substr(i, j - i))});
            i = j;
        } else {
            throw ConditionError("unexpected character '" + std::string(1, c) + "' in condition at offset " +
                                 std::to_string(i));
        }
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Condition parse() {
        if (toks_.size() == 1 && toks_[0].kind == Token::Word) {
            if (toks_[0].text == "true") return Condition::truth();
            if (toks_[0].text == "false") return Condition::falsity();
        }
        if (toks_.empty()) throw ConditionError("empty condition");
        std::vector<Clause> clauses;
        clauses.push_back(parse_clause());
        while (pos_ < toks_.size()) {
            expect(Token::OrOp, "'||'");
            clauses.push_back(parse_clause());
        }
        return Condition::from_clauses(std::move(clauses));
    }

private:
    Clause parse_clause() {
        Clause c;
        c.literals.push_back(parse_atom());
        while (pos_ < toks_.size() && toks_[pos_].kind == Token::AndOp) {
            ++pos_;
            c.literals.push_back(parse_atom());
        }
        return c;
    }

    Atom parse_atom() {
        const Token& first = next("an atom");
        if (first.kind != Token::Word && first.kind != Token::Quoted) fail("expected a variable or literal");
        const Token& op = next("an operator");
        if (op.kind == Token::EqOp || op.kind == Token::NeqOp) {
            if (first.kind != Token::Word || !is_identifier(first.text)) fail("expected a variable name before '=='");
            const Token& lit = next("a literal");
            if (lit.kind != Token::Word && lit.kind != Token::Quoted) fail("expected a literal");
            return {first.text, op.kind == Token::EqOp ? Predicate::Eq : Predicate::Neq, lit.text};
        }
        if (op.kind == Token::Word && op.text == "in") {
            return {var_name(), Predicate::Contains, first.text};
        }
        if (op.kind == Token::Word && op.text == "not") {
            const Token& in = next("'in'");
            if (in.kind != Token::Word || in.text != "in") fail("expected 'in' after 'not'");
            return {var_name(), Predicate::NotContains, first.text};
        }
        fail("expected '==', '!=', 'in' or 'not in'");
    }

    std::string var_name() {
        const Token& t = next("a variable name");
        if (t.kind != Token::Word || !is_identifier(t.text)) fail("expected a variable name");
        return t.text;
    }

    const Token& next(const char* what) {
        if (pos_ >= toks_.size()) throw ConditionError(std::string("unexpected end of condition, expected ") + what);
        return toks_[pos_++];
    }

    void expect(Token::Kind kind, const char* what) {
        if (next(what).kind != kind) fail(std::string("expected ") + what);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConditionError(msg + " (token " + std::to_string(pos_) + ")");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Condition Condition::parse(std::string_view text) { return Parser(tokenize(text)).parse(); }

// ---------------------------------------------------------------------------
// Evaluation

bool evaluate(const Atom& atom, const Valuation& val) {
    auto it = val.find(atom.var);
    if (it == val.end()) throw UnboundVariableError(atom.var);
    const Value& v = it->second;
    switch (atom.pred) {
        case Predicate::Eq:
        case Predicate::Neq: {
            const auto* s = std::get_if<std::string>(&v);
            if (!s) throw ConditionError("scalar predicate applied to set variable '" + atom.var + "'");
            return (*s == atom.operand) == (atom.pred == Predicate::Eq);
        }
        case Predicate::Contains:
        case Predicate::NotContains: {
            const auto* set = std::get_if<ElementSet>(&v);
            if (!set) throw ConditionError("membership predicate applied to scalar variable '" + atom.var + "'");
            return set->contains(atom.operand) == (atom.pred == Predicate::Contains);
        }
    }
    return false;
}

bool evaluate(const Clause& clause, const Valuation& val) {
    return std::all_of(clause.literals.begin(), clause.literals.end(),
                       [&](const Atom& a) { return evaluate(a, val); });
}

bool evaluate(const Condition& cond, const Valuation& val) {
    // Check bindings first so an unbound variable is reported even when an
    // earlier clause already decides the result.
    for (const auto& var : cond.variables()) {
        if (!val.contains(var)) throw UnboundVariableError(var);
    }
    return std::any_of(cond.clauses().begin(), cond.clauses().end(),
                       [&](const Clause& c) { return evaluate(c, val); });
}

// ---------------------------------------------------------------------------
// Boolean constructions

Condition conjoin(const Condition& a, const Condition& b) {
    std::vector<Clause> out;
    out.reserve(a.clauses().size() * b.clauses().size());
    for (const auto& ca : a.clauses()) {
        for (const auto& cb : b.clauses()) {
            Clause c = ca;
            c.literals.insert(c.literals.end(), cb.literals.begin(), cb.literals.end());
            out.push_back(std::move(c));
        }
    }
    return Condition::from_clauses(std::move(out));
}

Condition negate(const Condition& c) {
    Condition result = Condition::truth();
    for (const auto& clause : c.clauses()) {
        // not(l1 && ... && lk) = !l1 || ... || !lk
        std::vector<Clause> disj;
        for (const auto& lit : clause.literals) disj.push_back(Clause{{lit.negated()}});
        result = conjoin(result, Condition::from_clauses(std::move(disj)));
        if (result.is_false()) break;
    }
    return result;
}

Condition conjoin_negation(const Condition& a, const Condition& b) { return conjoin(a, negate(b)); }

Condition disjoin(const Condition& a, const Condition& b) {
    std::vector<Clause> all = a.clauses();
    all.insert(all.end(), b.clauses().begin(), b.clauses().end());
    return Condition::from_clauses(std::move(all));
}

std::vector<Condition> partition_disjuncts(const Condition& cond) {
    std::vector<Condition> out;
    for (const auto& c : cond.clauses()) out.push_back(Condition::from_clauses({c}));
    return out;
}

std::vector<ViolationTarget> minimal_violation_targets(const Clause& clause) {
    if (clause.literals.empty()) throw ConditionError("the empty clause (True) has no minimal violation targets");
    std::vector<ViolationTarget> out;
    for (std::size_t i = 0; i < clause.literals.size(); ++i) {
        std::vector<Atom> lits;
        for (std::size_t j = 0; j < clause.literals.size(); ++j) {
            lits.push_back(i == j ? clause.literals[j].negated() : clause.literals[j]);
        }
        out.push_back({clause.literals[i], Condition::all_of(std::move(lits))});
    }
    return out;
}

void validate_condition(const Condition& cond, std::span<const VarDecl> decls) {
    for (const auto& clause : cond.clauses()) {
        for (const auto& a : clause.literals) {
            const VarDecl* d = find_decl(decls, a.var);
            if (!d) throw UnboundVariableError(a.var);
            bool membership = a.pred == Predicate::Contains || a.pred == Predicate::NotContains;
            if (membership != d->is_set()) {
                throw ConditionError("predicate '" + std::string(predicate_name(a.pred)) +
                                     "' does not match the domain of '" + a.var + "'");
            }
            bool ok = membership ? d->element_index(a.operand) >= 0 : d->scalar_index(a.operand) >= 0;
            if (!ok) throw ConditionError("operand '" + a.operand + "' is outside the domain of '" + a.var + "'");
        }
    }
}

// ---------------------------------------------------------------------------
// Decision procedures

namespace {

std::optional<std::uint64_t> witness(const Condition& must, const Condition* must_not, std::span<const VarDecl> decls,
                                     ExecPolicy policy) {
    std::set<std::string> vars = must.variables();
    if (must_not) {
        auto more = must_not->variables();
        vars.insert(more.begin(), more.end());
    }
    kernels::AssignmentSpace space(decls, vars);
    auto a = kernels::compile(must, space);
    std::optional<kernels::CompiledCondition> b;
    if (must_not) b = kernels::compile(*must_not, space);
    const kernels::CompiledCondition* bp = b ? &*b : nullptr;
    return policy == ExecPolicy::Serial ? kernels::find_witness_serial(space, a, bp)
                                        : kernels::find_witness_parallel(space, a, bp);
}

}  // namespace

bool is_satisfiable(const Condition& cond, std::span<const VarDecl> decls, ExecPolicy policy) {
    if (cond.is_false()) return false;
    return witness(cond, nullptr, decls, policy).has_value();
}

bool entails(const Condition& a, const Condition& b, std::span<const VarDecl> decls, ExecPolicy policy) {
    if (a.is_false() || b.is_true()) {
        // Still validate bindings so unknown variables surface consistently.
        kernels::AssignmentSpace check(decls, a.variables());
        (void)check;
        return true;
    }
    // Syntactic fast path: every clause of a is subsumed by some clause of b.
    bool syntactic = std::all_of(a.clauses().begin(), a.clauses().end(), [&](const Clause& ca) {
        return std::any_of(b.clauses().begin(), b.clauses().end(), [&](const Clause& cb) {
            return std::includes(ca.literals.begin(), ca.literals.end(), cb.literals.begin(), cb.literals.end());
        });
    });
    if (syntactic) {
        auto vars = a.variables();
        auto more = b.variables();
        vars.insert(more.begin(), more.end());
        kernels::AssignmentSpace check(decls, vars);
        (void)check;
        return true;
    }
    return !witness(a, &b, decls, policy).has_value();
}

bool equivalent(const Condition& a, const Condition& b, std::span<const VarDecl> decls, ExecPolicy policy) {
    return entails(a, b, decls, policy) && entails(b, a, decls, policy);
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_disjuncts(const Condition& cond,
                                                                       std::span<const VarDecl> decls) {
    auto parts = partition_disjuncts(cond);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            if (is_satisfiable(conjoin(parts[i], parts[j]), decls)) out.emplace_back(i, j);
        }
    }
    return out;
}

}  // namespace ffg
