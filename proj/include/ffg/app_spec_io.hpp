#pragma once

#include <filesystem>
#include <string>

#include "ffg/app_model.hpp"

namespace ffg {

/// Parses and validates an app spec document (JSON). Throws SpecError.
AppSpec load_spec(const std::string& document);
AppSpec load_spec_file(const std::filesystem::path& path);

}  // namespace ffg
