#include "due/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace due {

using json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(std::string(what) + " file '" + path.string() + "' does not exist or is unreadable");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object())
        throw ParseError("scenario: expected an object at " + where);
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ParseError("scenario: unknown key '" + it.key() + "' at " + where);
}

const json& require(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError("scenario: missing key '" + std::string(key) + "' at " + where);
    return *it;
}

double number(const json& obj, const std::string& where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_number())
        throw ParseError("scenario: '" + std::string(key) + "' at " + where + " must be a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& where, const char* key) {
    if (!v.is_number_unsigned())
        throw ParseError("scenario: '" + std::string(key) + "' at " + where + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

template <class T, class Read>
void optional(const json& obj, const char* key, T& target, Read read) {
    if (auto it = obj.find(key); it != obj.end())
        target = read(*it);
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json")
        return ReportFormat::json;
    if (name == "csv")
        return ReportFormat::csv;
    throw ParseError("unknown output format '" + std::string(name) + "' (expected json or csv)");
}

CohortProbe parse_cohort_probe(std::string_view name) {
    if (name == "leading_vehicle")
        return CohortProbe::leading_vehicle;
    if (name == "cohort_average")
        return CohortProbe::cohort_average;
    throw ParseError("unknown cohort probe '" + std::string(name) + "' (expected leading_vehicle or cohort_average)");
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    reject_unknown_keys(doc, "/", {"network", "grid", "penalty", "solver", "output", "oracle", "loading"});

    const json& net_ref = require(doc, "/", "network");
    if (!net_ref.is_string())
        throw ParseError("scenario: 'network' must be a string path");
    std::filesystem::path network_path = net_ref.get<std::string>();
    if (network_path.is_relative())
        network_path = base_dir / network_path;

    const json& g = require(doc, "/", "grid");
    reject_unknown_keys(g, "/grid", {"t0", "tf", "n_bins"});
    const double t0 = number(g, "/grid", "t0");
    const double tf = number(g, "/grid", "tf");
    const std::size_t n_bins = count(require(g, "/grid", "n_bins"), "/grid", "n_bins");
    std::optional<TimeGrid> grid;
    try {
        grid.emplace(t0, tf, n_bins);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }

    Network network = parse_network(read_file(network_path, "network"));

    const json& pen = require(doc, "/", "penalty");
    reject_unknown_keys(pen, "/penalty", {"T_A", "gamma_early", "gamma_late", "T_A_by_od"});
    SchedulePenaltySpec base;
    base.desired_arrival = number(pen, "/penalty", "T_A");
    base.early_coef = number(pen, "/penalty", "gamma_early");
    base.late_coef = number(pen, "/penalty", "gamma_late");
    std::vector<SchedulePenaltySpec> per_od(network.od_pairs.size(), base);
    if (auto it = pen.find("T_A_by_od"); it != pen.end()) {
        if (!it->is_array() || it->size() != network.od_pairs.size())
            throw ParseError("scenario: 'T_A_by_od' must be an array with one entry per od pair");
        for (std::size_t od = 0; od < per_od.size(); ++od) {
            if (!(*it)[od].is_number())
                throw ParseError("scenario: T_A_by_od/" + std::to_string(od) + " must be a number");
            per_od[od].desired_arrival = (*it)[od].get<double>();
        }
    }

    Scenario sc{network_path, Problem{std::move(network), *grid, std::move(per_od), {}}, {}, {}, ReportFormat::json};

    if (auto it = doc.find("loading"); it != doc.end()) {
        reject_unknown_keys(*it, "/loading", {"horizon_multiple", "probe"});
        if (it->contains("horizon_multiple"))
            sc.problem.loading.horizon_multiple = number(*it, "/loading", "horizon_multiple");
        if (auto probe = it->find("probe"); probe != it->end()) {
            if (!probe->is_string())
                throw ParseError("scenario: 'probe' at /loading must be a string");
            sc.problem.loading.probe = parse_cohort_probe(probe->get<std::string>());
        }
    }

    const json& sol = require(doc, "/", "solver");
    reject_unknown_keys(sol, "/solver", {"alpha", "tol_gap", "tol_change", "max_iters", "step_halving", "tol_flow"});
    sc.solver.step_size = number(sol, "/solver", "alpha");
    sc.solver.tol_gap = number(sol, "/solver", "tol_gap");
    sc.solver.tol_change = number(sol, "/solver", "tol_change");
    sc.solver.max_iters = count(require(sol, "/solver", "max_iters"), "/solver", "max_iters");
    const json& halving = require(sol, "/solver", "step_halving");
    if (!halving.is_boolean())
        throw ParseError("scenario: 'step_halving' at /solver must be a boolean");
    sc.solver.step_halving = halving.get<bool>();
    if (auto it = sol.find("tol_flow"); it != sol.end())
        sc.solver.tol_flow = number(sol, "/solver", "tol_flow");

    if (auto it = doc.find("oracle"); it != doc.end()) {
        reject_unknown_keys(*it, "/oracle", {"iters", "initial_step", "starts"});
        optional(*it, "iters", sc.oracle.iters, [](const json& v) { return count(v, "/oracle", "iters"); });
        optional(*it, "starts", sc.oracle.starts, [](const json& v) { return count(v, "/oracle", "starts"); });
        if (it->contains("initial_step"))
            sc.oracle.initial_step = number(*it, "/oracle", "initial_step");
    }

    if (auto it = doc.find("output"); it != doc.end()) {
        reject_unknown_keys(*it, "/output", {"format"});
        const json& f = require(*it, "/output", "format");
        if (!f.is_string())
            throw ParseError("scenario: 'format' at /output must be a string");
        sc.format = parse_report_format(f.get<std::string>());
    }

    try {
        validate(sc.problem);
        validate(sc.solver);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path, "scenario"), path.parent_path());
}

}  // namespace due
