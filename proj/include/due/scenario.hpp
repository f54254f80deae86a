#pragma once

#include <filesystem>
#include <string_view>

#include "due/oracle.hpp"
#include "due/solver.hpp"

namespace due {

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(std::string_view name);  // throws ParseError
CohortProbe parse_cohort_probe(std::string_view name);    // throws ParseError

/// A solve request: the network, time grid, schedule penalty, solver
/// settings, and report format, all read from one JSON file.
struct Scenario {
    std::filesystem::path network_path;
    Problem problem;
    SolverConfig solver;
    oracle::BruteForceOptions oracle;
    ReportFormat format = ReportFormat::json;
};

/// Reads and validates a scenario file. A relative `network` path is resolved
/// against the scenario file's directory. Throws ParseError or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Same, from text already in memory; `base_dir` resolves the network path.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);

}  // namespace due
