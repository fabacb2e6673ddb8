#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "ffg/condition.hpp"

namespace ffg {

/// Goal label plus a unit-norm embedding and topic tags.
struct GoalDescriptor {
    std::string label;
    std::vector<double> vector;
    std::set<std::string> topics;

    /// Normalizes `vec`; throws Error on a zero or empty vector.
    static GoalDescriptor make(std::string label, std::vector<double> vec, std::set<std::string> topics);
    friend bool operator==(const GoalDescriptor&, const GoalDescriptor&) = default;
};

/// Cosine similarity; throws Error on dimension mismatch.
double cosine(const GoalDescriptor& a, const GoalDescriptor& b);

/// Weighted mean of the parts' vectors, renormalized. Label is the
/// highest-weight label (first wins ties); topics are unioned.
GoalDescriptor mean_goal(std::span<const GoalDescriptor> parts, std::span<const double> weights = {});

struct ClusterResult {
    std::vector<std::vector<std::string>> clusters;  // trace ids, input order inside each cluster
    double separation = 1.0;
};

}  // namespace ffg
