#include "sdfm/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdfm/errors.hpp"

namespace sdfm {

using nlohmann::json;

bool RunReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["wall_time_sec"] = wall_time_sec;
    j["checks"] = json::array();
    for (const auto& c : checks) {
        json jc;
        jc["name"] = c.name;
        jc["passed"] = c.passed;
        jc["measured"] = c.measured;
        jc["threshold"] = c.threshold;
        jc["relation"] = c.relation;
        jc["details"] = c.details;
        j["checks"].push_back(std::move(jc));
    }
    return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
    json j = json::parse(text);
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.wall_time_sec = j.at("wall_time_sec").get<double>();
    for (const auto& jc : j.at("checks")) {
        CheckResult c;
        c.name = jc.at("name").get<std::string>();
        c.passed = jc.at("passed").get<bool>();
        c.measured = jc.at("measured").get<std::vector<double>>();
        c.threshold = jc.at("threshold").get<double>();
        c.relation = jc.at("relation").get<std::string>();
        c.details = jc.at("details").get<std::string>();
        r.checks.push_back(std::move(c));
    }
    return r;
}

void RunReport::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report: " + path);
    out << to_json() << "\n";
}

RunReport RunReport::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read report: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

} // namespace sdfm
