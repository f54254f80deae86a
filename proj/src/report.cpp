#include "due/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace due {

using json = nlohmann::json;

namespace {

std::string od_name(const Network& net, std::size_t od) {
    const auto& o = net.od_pairs[od];
    return net.nodes[o.origin] + "-" + net.nodes[o.destination];
}

json bins_table(const Network& net, const auto& matrix) {
    json rows = json::array();
    for (std::size_t p = 0; p < matrix.rows(); ++p) {
        auto r = matrix.row(p);
        rows.push_back({{"path", net.paths[p].id}, {"bins", std::vector<double>(r.begin(), r.end())}});
    }
    return rows;
}

std::ofstream open_for_write(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write report file '" + file.string() + "'");
    return out;
}

void write_bins_csv(const std::filesystem::path& file, const Network& net, const auto& matrix) {
    auto out = open_for_write(file);
    out << "path";
    for (std::size_t k = 0; k < matrix.cols(); ++k)
        out << ",bin_" << k;
    out << '\n';
    for (std::size_t p = 0; p < matrix.rows(); ++p) {
        out << net.paths[p].id;
        for (double v : matrix.row(p))
            out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json report_json(const Solution& s, const Problem& problem, const ReportContext& context) {
    const Network& net = problem.network;
    json doc;
    doc["command"] = context.command;
    if (context.seed)
        doc["seed"] = *context.seed;
    doc["converged"] = s.converged;
    doc["iterations"] = s.iterations;
    doc["gap"] = {{"dual", s.gap.dual},
                  {"complementarity", s.gap.complementarity},
                  {"support", s.support_residual},
                  {"tol_flow", s.tol_flow}};

    json demand = json::array();
    for (std::size_t od = 0; od < net.od_pairs.size(); ++od)
        demand.push_back({{"od", od_name(net, od)},
                          {"Q", s.demand.terminal[od]},
                          {"theta_at_Q", s.gap.theta[od]},
                          {"min_effective_delay", s.gap.min_effective_delay[od]},
                          {"multiplier", s.gap.multipliers[od]}});
    doc["demand"] = std::move(demand);
    doc["flows"] = bins_table(net, s.flows);
    doc["effective_delay"] = bins_table(net, s.effective_delay);

    json trace = json::array();
    for (const auto& r : s.trace)
        trace.push_back({{"iteration", r.iteration},
                         {"dual", r.dual},
                         {"complementarity", r.complementarity},
                         {"support", r.support},
                         {"change", r.change},
                         {"step_size", r.step_size}});
    doc["trace"] = std::move(trace);

    json links = json::array();
    for (std::size_t l = 0; l < net.links.size(); ++l)
        links.push_back({{"link", net.links[l].id}, {"clamp_count", s.link_clamp_counts.at(l)}});
    doc["loading"] = {{"clamp_count", s.clamp_count()},
                      {"max_arrival_time", s.max_arrival_time},
                      {"late_arrival_mass", s.late_arrival_mass},
                      {"late_cohorts", s.late_cohorts},
                      {"links", links}};
    doc["grid"] = {{"t0", problem.grid.t0()}, {"tf", problem.grid.tf()}, {"n_bins", problem.grid.n_bins()}};
    return doc;
}

std::vector<std::filesystem::path> emit_report(const Solution& s, const Problem& problem, ReportFormat format,
                                               const std::filesystem::path& out_dir, const ReportContext& context) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "'");

    const Network& net = problem.network;
    std::vector<std::filesystem::path> written;
    if (format == ReportFormat::json) {
        const auto file = out_dir / "report.json";
        auto out = open_for_write(file);
        out << report_json(s, problem, context).dump(2) << '\n';
        if (!out)
            throw std::runtime_error("failed writing '" + file.string() + "'");
        written.push_back(file);
        return written;
    }

    {
        const auto file = out_dir / "summary.csv";
        auto out = open_for_write(file);
        out << "key,value\n";
        out << "command," << context.command << '\n';
        if (context.seed)
            out << "seed," << *context.seed << '\n';
        out << "converged," << (s.converged ? "true" : "false") << '\n';
        out << "iterations," << s.iterations << '\n';
        out << "dual," << format_double(s.gap.dual) << '\n';
        out << "complementarity," << format_double(s.gap.complementarity) << '\n';
        out << "support," << format_double(s.support_residual) << '\n';
        out << "tol_flow," << format_double(s.tol_flow) << '\n';
        out << "clamp_count," << s.clamp_count() << '\n';
        out << "max_arrival_time," << format_double(s.max_arrival_time) << '\n';
        out << "late_arrival_mass," << format_double(s.late_arrival_mass) << '\n';
        out << "late_cohorts," << s.late_cohorts << '\n';
        written.push_back(file);
    }
    {
        const auto file = out_dir / "demand.csv";
        auto out = open_for_write(file);
        out << "od,Q,theta_at_Q,min_effective_delay,multiplier\n";
        for (std::size_t od = 0; od < net.od_pairs.size(); ++od)
            out << od_name(net, od) << ',' << format_double(s.demand.terminal[od]) << ','
                << format_double(s.gap.theta[od]) << ',' << format_double(s.gap.min_effective_delay[od]) << ','
                << format_double(s.gap.multipliers[od]) << '\n';
        written.push_back(file);
    }
    write_bins_csv(out_dir / "flows.csv", net, s.flows);
    written.push_back(out_dir / "flows.csv");
    write_bins_csv(out_dir / "effective_delay.csv", net, s.effective_delay);
    written.push_back(out_dir / "effective_delay.csv");
    {
        const auto file = out_dir / "trace.csv";
        auto out = open_for_write(file);
        out << "iteration,dual,complementarity,support,change,step_size\n";
        for (const auto& r : s.trace)
            out << r.iteration << ',' << format_double(r.dual) << ',' << format_double(r.complementarity) << ','
                << format_double(r.support) << ',' << format_double(r.change) << ',' << format_double(r.step_size)
                << '\n';
        written.push_back(file);
    }
    {
        const auto file = out_dir / "links.csv";
        auto out = open_for_write(file);
        out << "link,clamp_count\n";
        for (std::size_t l = 0; l < net.links.size(); ++l)
            out << net.links[l].id << ',' << s.link_clamp_counts.at(l) << '\n';
        written.push_back(file);
    }
    return written;
}

}  // namespace due
