#include "due/cli.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "due/oracle.hpp"
#include "due/report.hpp"

namespace due::cli {

namespace {

void diagnostic(std::ostream& err, const char* kind, const std::string& message) {
    err << nlohmann::json{{"level", "error"}, {"kind", kind}, {"message", message}}.dump() << '\n';
}

const char* verb(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::validate: return "validate";
        case Command::oracle: return "oracle";
    }
    return "?";
}

int finish(const Solution& s, const Scenario& sc, const Request& req, std::ostream& out) {
    ReportContext ctx{verb(req.command), req.seed};
    const auto files = emit_report(s, sc.problem, req.format.value_or(sc.format), req.out_dir, ctx);
    out << verb(req.command) << ": " << (s.converged ? "converged" : "not converged") << " after " << s.iterations
        << " iterations; dual=" << s.gap.dual << " complementarity=" << s.gap.complementarity
        << " clamp_count=" << s.clamp_count() << '\n';
    for (std::size_t od = 0; od < s.demand.terminal.size(); ++od)
        out << "  od " << od << ": Q=" << s.demand.terminal[od] << " theta=" << s.gap.theta[od] << '\n';
    for (const auto& f : files)
        out << "  wrote " << f.string() << '\n';
    return s.converged ? kConverged : kNotConverged;
}

}  // namespace

int run_scenario(const Request& req, std::ostream& out, std::ostream& err) {
    std::optional<Scenario> loaded;
    try {
        loaded = load_scenario(req.scenario);
    } catch (const ParseError& e) {
        diagnostic(err, "parse", e.what());
        return kValidationError;
    } catch (const ValidationError& e) {
        diagnostic(err, "validation", e.what());
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        diagnostic(err, "validation", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        diagnostic(err, "internal", e.what());
        return kInternalError;
    }

    const Scenario& sc = *loaded;
    try {
        switch (req.command) {
            case Command::validate:
                out << "validate: ok (" << sc.problem.network.nodes.size() << " nodes, "
                    << sc.problem.network.links.size() << " links, " << sc.problem.network.od_pairs.size()
                    << " od pairs, " << sc.problem.network.paths.size() << " paths, " << sc.problem.grid.n_bins()
                    << " bins)\n";
                return kConverged;
            case Command::solve:
                return finish(solve_due(sc.problem, sc.solver), sc, req, out);
            case Command::oracle: {
                oracle::BruteForceOptions opts = sc.oracle;
                if (req.seed)
                    opts.seed = *req.seed;
                const auto bf = oracle::brute_force_vi(sc.problem, opts);
                Solution s = certify(sc.problem, bf.flows, sc.solver);
                s.iterations = opts.iters;
                s.converged = std::max({s.gap.dual, s.gap.complementarity, s.support_residual}) <= sc.solver.tol_gap;
                const bool frozen = std::all_of(sc.problem.network.links.begin(), sc.problem.network.links.end(),
                                                [](const Link& l) { return l.congestion_slope == 0.0; });
                if (frozen) {
                    const auto eq = oracle::frozen_delay_equilibrium(oracle::frozen_instance(sc.problem));
                    for (std::size_t od = 0; od < eq.size(); ++od)
                        out << "  od " << od << ": closed-form Q*=" << eq[od].demand
                            << " min effective delay=" << eq[od].min_effective_delay << '\n';
                }
                return finish(s, sc, req, out);
            }
        }
    } catch (const DivergenceError& e) {
        diagnostic(err, "divergence", e.what());
    } catch (const NumericFailure& e) {
        diagnostic(err, "numeric", e.what());
    } catch (const std::exception& e) {
        diagnostic(err, "internal", e.what());
    }
    return kInternalError;
}

}  // namespace due::cli
