#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "due/cli.hpp"
#include "test_support.hpp"

using namespace due;
using due::testing::fixture;
using due::testing::read_text;
using due::testing::scenario;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(cli::Command cmd, const std::string& scenario_path, const fs::path& out_dir,
        std::optional<ReportFormat> format = std::nullopt) {
    cli::Request req;
    req.command = cmd;
    req.scenario = scenario_path;
    req.out_dir = out_dir;
    req.format = format;
    std::ostringstream out, err;
    const int status = cli::run_scenario(req, out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "due_test_cli" / name;
    fs::remove_all(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_text(file.string()));
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json read_json(const fs::path& file) { return nlohmann::json::parse(read_text(file.string())); }

}  // namespace

TEST_CASE("choke scenario exits 0 with zero demand") {
    const auto dir = scratch("choke");
    const Run r = run(cli::Command::solve, scenario("choke.json"), dir);
    CHECK(r.status == cli::kConverged);
    const auto report = read_json(dir / "report.json");
    CHECK(report["demand"][0]["Q"].get<double>() == 0.0);
    CHECK(report["converged"].get<bool>());
}

TEST_CASE("desired arrival at or past tf is a validation error") {
    const Run r = run(cli::Command::solve, fixture("late_target.json"), scratch("late"));
    CHECK(r.status == cli::kValidationError);
    const auto diag = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
    CHECK(diag["kind"] == "validation");
    CHECK(diag["message"].get<std::string>().find("T_A") != std::string::npos);
    CHECK(run(cli::Command::validate, fixture("late_target.json"), scratch("late_v")).status == cli::kValidationError);
}

TEST_CASE("missing scenario file is a validation error") {
    CHECK(run(cli::Command::solve, fixture("no_such_scenario.json"), scratch("missing")).status == cli::kValidationError);
}

TEST_CASE("frozen scenario reports Q = 100") {
    const auto dir = scratch("frozen");
    const Run r = run(cli::Command::solve, scenario("frozen.json"), dir);
    CHECK(r.status == cli::kConverged);
    const auto report = read_json(dir / "report.json");
    CHECK(std::abs(report["demand"][0]["Q"].get<double>() - 100.0) <= 1e-3);
}

TEST_CASE("validate verb checks without solving") {
    const auto dir = scratch("validate");
    CHECK(run(cli::Command::validate, scenario("parallel2.json"), dir).status == cli::kConverged);
    CHECK_FALSE(fs::exists(dir / "report.json"));
}

TEST_CASE("hitting max_iters exits 3 and still writes the report") {
    const auto dir = scratch("p2");
    CHECK(run(cli::Command::solve, scenario("parallel2.json"), dir).status == cli::kNotConverged);
    CHECK_FALSE(read_json(dir / "report.json")["converged"].get<bool>());
}

TEST_CASE("json and csv reports carry the same numbers") {
    const auto jdir = scratch("rt_json"), cdir = scratch("rt_csv");
    REQUIRE(run(cli::Command::solve, scenario("parallel2_8.json"), jdir).status == cli::kConverged);
    REQUIRE(run(cli::Command::solve, scenario("parallel2_8.json"), cdir, ReportFormat::csv).status == cli::kConverged);
    const auto j = read_json(jdir / "report.json");

    const auto flows = read_csv(cdir / "flows.csv");
    REQUIRE(flows.size() == 1 + 2);
    REQUIRE(flows[0].size() == 1 + 8);
    for (std::size_t p = 0; p < 2; ++p) {
        CHECK(flows[p + 1][0] == j["flows"][p]["path"].get<std::string>());
        for (std::size_t k = 0; k < 8; ++k)
            CHECK(std::stod(flows[p + 1][k + 1]) == j["flows"][p]["bins"][k].get<double>());
    }
    const auto demand = read_csv(cdir / "demand.csv");
    REQUIRE(demand.size() == 2);
    CHECK(std::stod(demand[1][1]) == j["demand"][0]["Q"].get<double>());
    CHECK(std::stod(demand[1][2]) == j["demand"][0]["theta_at_Q"].get<double>());
    CHECK(std::stod(demand[1][4]) == j["demand"][0]["multiplier"].get<double>());

    const auto psi = read_csv(cdir / "effective_delay.csv");
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t k = 0; k < 8; ++k)
            CHECK(std::stod(psi[p + 1][k + 1]) == j["effective_delay"][p]["bins"][k].get<double>());

    const auto trace = read_csv(cdir / "trace.csv");
    CHECK(trace.size() == 1 + j["trace"].size());
}

TEST_CASE("reports are byte identical across runs") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    run(cli::Command::solve, scenario("parallel2_8.json"), a);
    run(cli::Command::solve, scenario("parallel2_8.json"), b);
    CHECK(read_text((a / "report.json").string()) == read_text((b / "report.json").string()));
}

TEST_CASE("unwritable output directory is an internal error") {
    const auto base = scratch("blocked");
    fs::create_directories(base);
    std::ofstream(base / "file") << "x";
    const Run r = run(cli::Command::solve, scenario("choke.json"), base / "file" / "out");
    CHECK(r.status == cli::kInternalError);
    CHECK(r.err.find("\"level\":\"error\"") != std::string::npos);
}
