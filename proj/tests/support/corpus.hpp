#pragma once

#include <memory>
#include <string>

#include "ffg/app_spec_io.hpp"

namespace testing_support {

inline std::string corpus_path(const std::string& app) {
    return std::string(FFG_SOURCE_DIR) + "/corpus/" + app + ".app";
}

inline std::shared_ptr<const ffg::AppSpec> load(const std::string& app) {
    return std::make_shared<const ffg::AppSpec>(ffg::load_spec_file(corpus_path(app)));
}

inline const char* kApps[] = {"blood_pressure", "notes", "shop", "todo", "wallet"};

}  // namespace testing_support
