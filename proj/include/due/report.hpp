#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "due/scenario.hpp"
#include "due/solver.hpp"

namespace due {

struct ReportContext {
    std::string command = "solve";
    std::optional<std::uint64_t> seed;
};

/// The full solution document: convergence, residuals, demand table,
/// flows, effective delays, iteration trace and loading diagnostics.
nlohmann::json report_json(const Solution& solution, const Problem& problem, const ReportContext& context = {});

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Writes report.json, or one CSV per table (summary, demand, flows,
/// effective_delay, trace, links), into `out_dir`. Returns the written files.
/// Throws std::runtime_error when the directory cannot be created or written.
std::vector<std::filesystem::path> emit_report(const Solution& solution, const Problem& problem, ReportFormat format,
                                               const std::filesystem::path& out_dir,
                                               const ReportContext& context = {});

}  // namespace due
