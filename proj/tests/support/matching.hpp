#pragma once

#include "ffg/executor.hpp"

namespace testing_support {

// A report hits an injected bug when kind and page agree and the bug's match
// string occurs in the violated op, crash signal, MR tag or toast.
inline bool report_matches(const ffg::BugReport& r, const ffg::InjectedBug& b) {
    if (r.kind != b.kind || r.page != b.page) return false;
    for (const char* key : {"op", "crash_signal", "mr", "toast_anomaly"}) {
        auto it = r.violation.find(key);
        if (it != r.violation.end() && it->is_string() && it->get<std::string>().find(b.match) != std::string::npos)
            return true;
    }
    return false;
}

inline std::size_t hits(const std::vector<ffg::BugReport>& reps, const ffg::InjectedBug& b) {
    std::size_t n = 0;
    for (const auto& r : reps) n += report_matches(r, b);
    return n;
}

}  // namespace testing_support
