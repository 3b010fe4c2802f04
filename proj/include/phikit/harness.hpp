#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phikit/io.hpp"

namespace phikit {

struct SuiteConfig {
    std::uint64_t seed = 42;
    int jobs = 1;
    std::optional<int> trials;            // permprod / distribution trial counts
    std::uint64_t cap = 1000000;          // enumeration cap for the connected-subgraph sweep
    json overrides = json::object();      // from a config file
};

// one summary line per criterion
struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string summary;
    double seconds = 0;
};

struct SuiteReport {
    std::string suite;
    json params;
    std::uint64_t seed = 0;
    double seconds = 0;
    bool pass = true;
    std::vector<CriterionResult> criteria;
    // CSV detail, deterministic for a fixed config
    std::vector<std::string> columns{"criterion", "case", "checked", "violations", "value", "detail"};
    std::vector<std::vector<std::string>> rows;
    std::vector<json> counterexamples;
};

const std::vector<std::string>& suite_names();
std::vector<int> suite_criteria(const std::string& name);  // throws std::invalid_argument on unknown names
SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg);

// runs one acceptance criterion (1..13), appending detail rows to `report`
CriterionResult check_criterion(int id, const SuiteConfig& cfg, SuiteReport& report);

std::string report_csv(const SuiteReport& r);
json report_json(const SuiteReport& r);
// <dir>/<suite>.json and <dir>/<suite>.csv
void write_report(const SuiteReport& r, const std::string& dir);

// config file: {"version":1,"seed":..,"jobs":..,"trials":..,"cap":..}
SuiteConfig load_config(const std::string& path);

// td by plain vertex-removal recursion, no memo; edge-height convention
int tree_depth_naive(const SimpleGraph& g);

std::string artifact_version();

// fn(i) for i in [0, n) over `jobs` threads; exceptions are rethrown after the join
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace phikit
