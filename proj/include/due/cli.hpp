#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "due/scenario.hpp"

namespace due::cli {

enum ExitStatus : int {
    kConverged = 0,
    kInternalError = 1,
    kValidationError = 2,
    kNotConverged = 3,
};

enum class Command { solve, validate, oracle };

struct Request {
    Command command = Command::solve;
    std::filesystem::path scenario;
    std::filesystem::path out_dir = "due_out";
    std::optional<ReportFormat> format;  // overrides the scenario's output.format
    std::optional<std::uint64_t> seed;
};

/// Runs one verb end to end. Progress goes to `out`; every error is also
/// written to `err` as a single-line JSON object {"level","kind","message"}.
int run_scenario(const Request& request, std::ostream& out, std::ostream& err);

}  // namespace due::cli
