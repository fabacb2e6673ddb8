#include "ffg/enumeration.hpp"

#include <atomic>
#include <limits>

#include <omp.h>

namespace ffg::kernels {

namespace {
// Below this many assignments the thread fan-out costs more than it saves.
constexpr std::uint64_t kParallelMin = 4096;
}  // namespace

AssignmentSpace::AssignmentSpace(std::span<const VarDecl> decls, const std::set<std::string>& vars) {
    for (const auto& v : vars) {
        const VarDecl* d = find_decl(decls, v);
        if (!d) throw UnboundVariableError(v);
        decls_.push_back(*d);
    }
    for (const auto& d : decls_) {
        std::uint64_t r = d.domain_size();
        radix_.push_back(r);
        if (r == 0 || size_ > EnumerationCapError::kCap / r) {
            throw EnumerationCapError(assignment_space_size(decls_));
        }
        size_ *= r;
    }
}

int AssignmentSpace::slot_of(std::string_view var) const {
    for (std::size_t i = 0; i < decls_.size(); ++i) {
        if (decls_[i].name == var) return static_cast<int>(i);
    }
    return -1;
}

void AssignmentSpace::decode(std::uint64_t idx, std::vector<std::uint32_t>& digits) const {
    digits.resize(radix_.size());
    for (std::size_t i = 0; i < radix_.size(); ++i) {
        digits[i] = static_cast<std::uint32_t>(idx % radix_[i]);
        idx /= radix_[i];
    }
}

Valuation AssignmentSpace::valuation(std::uint64_t idx) const {
    std::vector<std::uint32_t> digits;
    decode(idx, digits);
    Valuation out;
    for (std::size_t i = 0; i < decls_.size(); ++i) {
        const auto& d = decls_[i];
        if (d.is_set()) {
            ElementSet s;
            for (std::size_t b = 0; b < d.labels.size(); ++b) {
                if (digits[i] & (1u << b)) s.insert(d.labels[b]);
            }
            out[d.name] = std::move(s);
        } else {
            out[d.name] = d.scalar_values()[digits[i]];
        }
    }
    return out;
}

bool CompiledCondition::holds(const std::vector<std::uint32_t>& digits) const {
    for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
        bool all = true;
        for (std::uint32_t k = starts[c]; k < starts[c + 1] && all; ++k) {
            const auto& a = atoms[k];
            std::uint32_t d = digits[a.slot];
            switch (a.pred) {
                case Predicate::Eq:
                    all = a.operand_valid && d == a.operand;
                    break;
                case Predicate::Neq:
                    all = !a.operand_valid || d != a.operand;
                    break;
                case Predicate::Contains:
                    all = a.operand_valid && (d >> a.operand) & 1u;
                    break;
                case Predicate::NotContains:
                    all = !a.operand_valid || !((d >> a.operand) & 1u);
                    break;
            }
        }
        if (all) return true;
    }
    return false;
}

CompiledCondition compile(const Condition& cond, const AssignmentSpace& space) {
    CompiledCondition out;
    for (const auto& clause : cond.clauses()) {
        out.starts.push_back(static_cast<std::uint32_t>(out.atoms.size()));
        for (const auto& a : clause.literals) {
            int slot = space.slot_of(a.var);
            if (slot < 0) throw UnboundVariableError(a.var);
            const VarDecl& d = space.decl(slot);
            bool membership = a.pred == Predicate::Contains || a.pred == Predicate::NotContains;
            if (membership != d.is_set()) {
                throw ConditionError("predicate '" + std::string(predicate_name(a.pred)) +
                                     "' does not match the domain of '" + a.var + "'");
            }
            int idx = membership ? d.element_index(a.operand) : d.scalar_index(a.operand);
            CompiledAtom ca;
            ca.slot = static_cast<std::uint32_t>(slot);
            ca.pred = a.pred;
            ca.operand_valid = idx >= 0;
            ca.operand = idx >= 0 ? static_cast<std::uint32_t>(idx) : 0;
            out.atoms.push_back(ca);
        }
    }
    out.starts.push_back(static_cast<std::uint32_t>(out.atoms.size()));
    return out;
}

std::optional<std::uint64_t> find_witness_serial(const AssignmentSpace& space, const CompiledCondition& must,
                                                 const CompiledCondition* must_not) {
    std::vector<std::uint32_t> digits;
    for (std::uint64_t i = 0; i < space.size(); ++i) {
        space.decode(i, digits);
        if (must.holds(digits) && !(must_not && must_not->holds(digits))) return i;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> find_witness_parallel(const AssignmentSpace& space, const CompiledCondition& must,
                                                   const CompiledCondition* must_not) {
    const std::uint64_t n = space.size();
    if (n < kParallelMin) return find_witness_serial(space, must, must_not);

    constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();
    std::atomic<std::uint64_t> best{kNone};
    const auto count = static_cast<std::int64_t>(n);

#pragma omp parallel
    {
        std::vector<std::uint32_t> digits;
#pragma omp for schedule(static, 1024)
        for (std::int64_t i = 0; i < count; ++i) {
            auto u = static_cast<std::uint64_t>(i);
            if (u >= best.load(std::memory_order_relaxed)) continue;
            space.decode(u, digits);
            if (must.holds(digits) && !(must_not && must_not->holds(digits))) {
                std::uint64_t cur = best.load(std::memory_order_relaxed);
                while (u < cur && !best.compare_exchange_weak(cur, u, std::memory_order_relaxed)) {
                }
            }
        }
    }
    std::uint64_t b = best.load();
    if (b == kNone) return std::nullopt;
    return b;
}

std::uint64_t count_models_serial(const AssignmentSpace& space, const CompiledCondition& cond) {
    std::vector<std::uint32_t> digits;
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < space.size(); ++i) {
        space.decode(i, digits);
        total += cond.holds(digits) ? 1 : 0;
    }
    return total;
}

std::uint64_t count_models_parallel(const AssignmentSpace& space, const CompiledCondition& cond) {
    const auto count = static_cast<std::int64_t>(space.size());
    std::uint64_t total = 0;
#pragma omp parallel reduction(+ : total)
    {
        std::vector<std::uint32_t> digits;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            space.decode(static_cast<std::uint64_t>(i), digits);
            total += cond.holds(digits) ? 1 : 0;
        }
    }
    return total;
}

}  // namespace ffg::kernels
