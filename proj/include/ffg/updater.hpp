#pragma once

// Folds executed traces back into the graph: node create / merge / split,
// then flow create / strengthen / weaken / merge driven by entailment.

#include <map>
#include <vector>

#include "ffg/ffg_io.hpp"
#include "ffg/oracle.hpp"

namespace ffg {

enum class UpdateKind { NodeCreate, NodeMerge, NodeSplit, FlowCreate, FlowStrengthen, FlowWeaken, FlowMerge };
std::string_view update_kind_name(UpdateKind k);

struct UpdateOp {
    UpdateKind kind;
    std::vector<std::string> before;
    std::vector<std::string> after;
    json justification;
};

json to_json(const UpdateOp& op);

struct UpdateThresholds {
    double sim = 0.7;
    double sep = 0.5;
    double intra = 0.7;
};

struct HomedSegment {
    Segment segment;
    HomeResult home;
};

/// Segments `exec`, homes each segment and splits nodes whose trace goals
/// separate. Fills `homed` (after splits, ids current) when given.
std::vector<UpdateOp> update_functionalities(FFG& ffg, ExecutionTrace& exec, const AppSpec& spec,
                                             const SemanticOracle& oracle, const UpdateThresholds& th,
                                             std::vector<HomedSegment>* homed = nullptr);

/// Candidate flows (id left empty) at contiguous node-changing boundaries.
std::vector<Flow> derive_flow(const ExecutionTrace& exec, const std::vector<HomedSegment>& homed, const FFG& ffg,
                              const SemanticOracle& oracle, const AppSpec& spec);

std::vector<UpdateOp> update_flows(FFG& ffg, const Flow& candidate, std::span<const VarDecl> decls);

struct IterationSummary {
    std::vector<UpdateOp> ops;
    std::map<std::string, std::size_t> counts;  // per op kind
    std::size_t mutations = 0;                  // ops that changed the graph
    std::uint64_t revision = 0;
};

IterationSummary apply_iteration(FFG& ffg, std::vector<ExecutionTrace>& traces, const AppSpec& spec,
                                 const SemanticOracle& oracle, const UpdateThresholds& th = {});

}  // namespace ffg
