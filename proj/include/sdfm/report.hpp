#pragma once

// Check results and run reports. Reports serialize to JSON and re-parse with
// every double bit-exact (shortest round-trip formatting).

#include <map>
#include <string>
#include <vector>

namespace sdfm {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::vector<double> measured;
    double threshold = 0.0;
    std::string relation; // e.g. "<", ">=", "== 0"; how measured relates to threshold
    std::string details;
};

struct RunReport {
    std::string command;
    std::map<std::string, std::string> config; // echo of the effective configuration
    std::vector<CheckResult> checks;
    double wall_time_sec = 0.0;

    bool all_passed() const;
    std::string to_json() const;
    static RunReport from_json(const std::string& text);
    void save(const std::string& path) const;
    static RunReport load(const std::string& path);
};

} // namespace sdfm
