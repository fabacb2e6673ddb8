#pragma once

// Functional Flow Graph: functionality nodes (goal, vars, traces) joined by
// flows n -(pi, phi, pi')-> n'.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffg/app_model.hpp"
#include "ffg/goal.hpp"

namespace ffg {

class GraphError : public Error {
public:
    using Error::Error;
};

struct Trace {
    std::string id;
    std::vector<ActionStep> steps;
    GoalDescriptor goal;
};

struct Functionality {
    std::string id;
    GoalDescriptor goal;
    std::set<std::string> vars;
    std::vector<Trace> traces;

    const Trace* trace(std::string_view tid) const;
    /// Trace with exactly these steps, if any.
    const Trace* find_trace(const std::vector<ActionStep>& steps) const;
};

struct Flow {
    std::string id;
    std::string source;
    std::string target;
    std::string pi;
    Condition phi;
    std::string pi_prime;
};

class FFG {
public:
    std::map<std::string, Functionality> functionalities;
    std::map<std::string, Flow> flows;
    std::uint64_t revision = 0;
    std::uint64_t next_flow = 1;

    const Functionality& functionality(std::string_view id) const;
    Functionality& functionality_mut(std::string_view id);
    bool has_functionality(std::string_view id) const;
    const Trace& trace(std::string_view func, std::string_view tid) const;

    /// New node with a slug id derived from `label` (suffixed when taken).
    std::string add_functionality(const GoalDescriptor& goal);
    /// Appends a trace, returning its roman-numeral id.
    std::string add_trace(std::string_view func, std::vector<ActionStep> steps, GoalDescriptor goal);
    std::string add_flow(std::string source, std::string pi, Condition phi, std::string target, std::string pi_prime);
    void remove_flow(std::string_view id);
    void set_phi(std::string_view id, Condition phi);
    void touch() { ++revision; }

    /// Throws GraphError on dangling references.
    void check_integrity() const;
};

std::string roman(unsigned n);
unsigned from_roman(std::string_view s);  // 0 when malformed
std::string slugify(std::string_view label);

enum class StepOrigin { Plan, Navigation, Recovery, Exploration };
std::string_view step_origin_name(StepOrigin o);

struct ExecStep {
    ActionStep step;
    StepOutcome outcome;
    int plan_index = 0;
    StepOrigin origin = StepOrigin::Plan;
    bool flagged = false;  // the step triggered a bug report
};

struct ExecutionTrace {
    std::vector<ExecStep> steps;
    std::vector<std::string> segment_labels;  // per step, empty when unattributed
    bool budget_exhausted = false;
    std::vector<std::string> diagnostics;
};

class SemanticOracle;

/// A goal-coherent run of ok steps within one plan step.
struct Segment {
    std::vector<std::size_t> indices;  // positions in the execution trace
    std::vector<ActionStep> steps;
    GoalDescriptor goal;
    std::set<std::string> vars;
    Valuation state_after;
};

std::vector<Segment> segment_trace(const ExecutionTrace& exec, const AppSpec& spec, const SemanticOracle& oracle,
                                   double sim_threshold);

struct HomeResult {
    std::string func;
    std::string trace;
    bool created_node = false;
    bool added_trace = false;
    double similarity = 0.0;
};

/// Places a segment into the graph: best node at or above the threshold,
/// else a node with the same goal label, else a new node.
HomeResult home_segment(FFG& ffg, const Segment& seg, const SemanticOracle& oracle, double sim_threshold);

/// True when no navigation or flagged step ran between the two segments.
bool contiguous(const ExecutionTrace& exec, const Segment& a, const Segment& b);

FFG initialize_ffg(ExecutionTrace& exec, const AppSpec& spec, const SemanticOracle& oracle, double sim_threshold);

std::vector<Flow> flows_from(const FFG& ffg, std::string_view func, std::string_view trace);

struct SharedPair {
    std::string a;
    std::string b;
    std::set<std::string> vars;
};
std::vector<SharedPair> shared_data_pairs(const FFG& ffg);

std::vector<Flow> find_flows_into(const FFG& ffg, std::string_view target, std::string_view var);

/// Pages of a functionality's traces, in first-appearance order.
std::vector<std::string> functionality_pages(const Functionality& f);

}  // namespace ffg
