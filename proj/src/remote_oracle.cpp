#include <atomic>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "ffg/oracle.hpp"

namespace ffg {

RemoteOracle::RemoteOracle(std::string endpoint) : endpoint_(std::move(endpoint)) {}

GoalDescriptor RemoteOracle::infer_page_goal(const Page& page) const {
    GoalDescriptor fallback = SpecOracle::infer_page_goal(page);

    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint_, m, url_re)) {
        ++failures_;
        return fallback;
    }
    std::string base = m[1].str();
    std::string path = m[2].matched ? m[2].str() : "/";

    nlohmann::json widgets = nlohmann::json::array();
    for (const auto& w : page.widgets) {
        widgets.push_back({{"id", w.id}, {"kind", std::string(widget_kind_name(w.kind))}, {"text", w.text}});
    }
    nlohmann::json req = {
        {"task", "page_goal"},
        {"prompt", "Describe the user goal served by the page titled \"" + page.title +
                       "\" as a short label and an embedding of the given dimension."},
        {"page", {{"id", page.id}, {"title", page.title}, {"widgets", widgets}}},
        {"dimension", page.goal_vector.size()},
    };

    try {
        httplib::Client cli(base);
        cli.set_connection_timeout(2);
        cli.set_read_timeout(5);
        auto res = cli.Post(path, req.dump(), "application/json");
        if (!res || res->status != 200) {
            ++failures_;
            return fallback;
        }
        auto body = nlohmann::json::parse(res->body);
        auto label = body.at("label").get<std::string>();
        auto vec = body.at("vector").get<std::vector<double>>();
        if (vec.size() != page.goal_vector.size()) {
            ++failures_;
            return fallback;
        }
        return GoalDescriptor::make(label, vec, page.topics);
    } catch (const std::exception&) {
        ++failures_;
        return fallback;
    }
}

}  // namespace ffg
