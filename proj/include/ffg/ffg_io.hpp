#pragma once

// Canonical JSON for graphs, traces and the smaller pieces the harness logs.
// Object keys are emitted sorted; conditions use the canonical renderer.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ffg/ffg.hpp"

namespace ffg {

using nlohmann::json;

json to_json(const ActionStep& s);
ActionStep step_from_json(const json& j, const std::string& path);
json to_json(const Valuation& v);
json to_json(const GoalDescriptor& g);
json to_json(const StepOutcome& o);
json to_json(const ExecutionTrace& t);

json to_json(const FFG& g);
FFG ffg_from_json(const json& j);

/// Canonical bytes: two-space indent, sorted keys, trailing newline.
std::string serialize(const FFG& g);
/// Throws GraphError naming the offending JSON path.
FFG deserialize(const std::string& document);

std::string dump_canonical(const json& j);
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Human-readable dump for show-ffg.
std::string render_text(const FFG& g);

}  // namespace ffg
