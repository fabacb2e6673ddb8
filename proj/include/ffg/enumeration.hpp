#pragma once

// Exhaustive assignment enumeration used by the condition decision procedures.
// Only variables a query mentions are enumerated; each gets a mixed radix
// (bool 2, enum n, int hi-lo+1, set 2^|U| as a bitmask over the universe).

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ffg/condition.hpp"

namespace ffg::kernels {

class AssignmentSpace {
public:
    /// Throws UnboundVariableError for undeclared names and
    /// EnumerationCapError when the product of radices exceeds the cap.
    AssignmentSpace(std::span<const VarDecl> decls, const std::set<std::string>& vars);

    std::uint64_t size() const { return size_; }
    std::size_t arity() const { return decls_.size(); }
    const VarDecl& decl(std::size_t slot) const { return decls_[slot]; }
    int slot_of(std::string_view var) const;

    /// Per-slot digit for assignment index `idx`.
    void decode(std::uint64_t idx, std::vector<std::uint32_t>& digits) const;
    Valuation valuation(std::uint64_t idx) const;

private:
    std::vector<VarDecl> decls_;
    std::vector<std::uint64_t> radix_;
    std::uint64_t size_ = 1;
};

struct CompiledAtom {
    std::uint32_t slot = 0;
    Predicate pred = Predicate::Eq;
    std::uint32_t operand = 0;   // scalar index or element bit position
    bool operand_valid = true;   // false when the operand lies outside the domain
};

struct CompiledCondition {
    // Clause boundaries in `atoms`; clause i spans [starts[i], starts[i+1]).
    std::vector<CompiledAtom> atoms;
    std::vector<std::uint32_t> starts;
    bool holds(const std::vector<std::uint32_t>& digits) const;
};

CompiledCondition compile(const Condition& cond, const AssignmentSpace& space);

/// Smallest index satisfying `must` and not `must_not` (if given).
std::optional<std::uint64_t> find_witness_serial(const AssignmentSpace& space, const CompiledCondition& must,
                                                 const CompiledCondition* must_not);

/// Same answer as the serial kernel, OpenMP-parallel over the index range.
std::optional<std::uint64_t> find_witness_parallel(const AssignmentSpace& space, const CompiledCondition& must,
                                                   const CompiledCondition* must_not);

/// Count of satisfying assignments; serial and parallel agree exactly.
std::uint64_t count_models_serial(const AssignmentSpace& space, const CompiledCondition& cond);
std::uint64_t count_models_parallel(const AssignmentSpace& space, const CompiledCondition& cond);

}  // namespace ffg::kernels
