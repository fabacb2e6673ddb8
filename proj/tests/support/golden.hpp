#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ffg/ffg.hpp"
#include "ffg/ffg_io.hpp"
#include "ffg/harness.hpp"
#include "support/corpus.hpp"

namespace testing_support {

// Structural comparison; goal vectors within 1e-9, flow conditions by
// equivalence. Returns the differences found.
inline std::vector<std::string> diff_graphs(const ffg::FFG& got, const ffg::FFG& want,
                                            std::span<const ffg::VarDecl> decls) {
    std::vector<std::string> out;
    auto close = [](const ffg::GoalDescriptor& a, const ffg::GoalDescriptor& b) {
        if (a.label != b.label || a.vector.size() != b.vector.size()) return false;
        for (std::size_t i = 0; i < a.vector.size(); ++i)
            if (std::abs(a.vector[i] - b.vector[i]) > 1e-9) return false;
        return true;
    };
    if (got.functionalities.size() != want.functionalities.size()) out.push_back("node count");
    for (const auto& [id, w] : want.functionalities) {
        if (!got.has_functionality(id)) {
            out.push_back("missing node " + id);
            continue;
        }
        const auto& f = got.functionality(id);
        if (!close(f.goal, w.goal)) out.push_back(id + ": goal");
        if (f.vars != w.vars) out.push_back(id + ": vars");
        if (f.traces.size() != w.traces.size()) {
            out.push_back(id + ": trace count");
            continue;
        }
        for (std::size_t i = 0; i < w.traces.size(); ++i) {
            if (f.traces[i].id != w.traces[i].id || f.traces[i].steps != w.traces[i].steps)
                out.push_back(id + "/" + w.traces[i].id + ": steps");
        }
    }
    if (got.flows.size() != want.flows.size()) out.push_back("flow count");
    for (const auto& [id, w] : want.flows) {
        auto it = got.flows.find(id);
        if (it == got.flows.end()) {
            out.push_back("missing flow " + id);
            continue;
        }
        const auto& e = it->second;
        if (e.source != w.source || e.pi != w.pi || e.target != w.target || e.pi_prime != w.pi_prime)
            out.push_back(id + ": endpoints");
        else if (!ffg::equivalent(e.phi, w.phi, decls))
            out.push_back(id + ": condition " + e.phi.render() + " vs " + w.phi.render());
    }
    return out;
}

inline ffg::FFG initial_graph(const std::string& app, ffg::ExecutionTrace* boot_out = nullptr) {
    auto spec = load(app);
    auto session = ffg::reset(spec, 1);
    auto boot = ffg::bootstrap_scripted(session, *spec->bootstrap);
    ffg::SpecOracle oracle;
    auto g = ffg::initialize_ffg(boot, *spec, oracle, 0.7);
    if (boot_out) *boot_out = boot;
    return g;
}

inline ffg::FFG golden(const std::string& name) {
    return ffg::deserialize(ffg::read_file(std::string(FFG_SOURCE_DIR) + "/golden/" + name));
}

}  // namespace testing_support
