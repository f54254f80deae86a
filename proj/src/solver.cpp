#include "due/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace due {

void validate(const Problem& problem) {
    validate(problem.network);
    if (problem.penalties.size() != problem.network.od_pairs.size())
        throw std::invalid_argument("problem: expected " + std::to_string(problem.network.od_pairs.size()) +
                                    " schedule penalty specs, got " + std::to_string(problem.penalties.size()));
    for (const auto& spec : problem.penalties)
        validate(spec, problem.grid);
    if (!(problem.loading.horizon_multiple >= 1.0))
        throw std::invalid_argument("problem: loading horizon multiple must be >= 1");
}

void validate(const SolverConfig& config) {
    if (!std::isfinite(config.step_size) || !(config.step_size > 0.0))
        throw std::invalid_argument("solver: alpha must be finite and > 0");
    if (!(config.tol_gap > 0.0))
        throw std::invalid_argument("solver: tol_gap must be > 0");
    if (!(config.tol_change > 0.0))
        throw std::invalid_argument("solver: tol_change must be > 0");
    if (config.max_iters < 1)
        throw std::invalid_argument("solver: max_iters must be >= 1");
    if (config.tol_flow && !(*config.tol_flow >= 0.0))
        throw std::invalid_argument("solver: tol_flow must be >= 0");
}

Evaluation evaluate(const Problem& problem, const PathFlowTrajectory& h) {
    Evaluation ev;
    ev.loading = propagate_path_cohorts(problem.network, problem.grid, h, problem.loading);
    ev.effective_delay =
        effective_delay_field(path_delay_field(ev.loading), problem.network, problem.penalties, problem.grid);
    ev.demand = cumulative_demand(h, problem.network, problem.grid);
    ev.theta.resize(problem.network.od_pairs.size());
    for (std::size_t od = 0; od < ev.theta.size(); ++od)
        ev.theta[od] = inverse_demand_value(problem.network.od_pairs[od].inverse_demand, ev.demand.terminal[od]);
    return ev;
}

double min_effective_delay(const EffectiveDelayField& psi, const Network& network, std::size_t od) {
    const auto paths = network.paths_of(od);
    if (paths.empty())
        throw std::invalid_argument("min_effective_delay: od pair " + std::to_string(od) + " has no paths");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t p : paths)
        for (double v : psi.row(p))
            m = std::min(m, v);
    return m;
}

PathFlowTrajectory project_nonnegative(const PathFlowTrajectory& g) {
    PathFlowTrajectory out = g;
    for (double& v : out.data())
        v = std::max(0.0, v);
    return out;
}

PathFlowTrajectory fixed_point_step(const PathFlowTrajectory& h, const EffectiveDelayField& psi,
                                    const std::vector<double>& theta, double step, const Network& network) {
    if (!psi.same_shape(h.rows(), h.cols()) || h.rows() != network.paths.size())
        throw std::invalid_argument("fixed_point_step: flow, effective delay and path set dimensions disagree");
    if (theta.size() != network.od_pairs.size())
        throw std::invalid_argument("fixed_point_step: need one inverse demand value per od pair");
    if (!(step > 0.0))
        throw std::invalid_argument("fixed_point_step: step size must be > 0");

    PathFlowTrajectory next(h.rows(), h.cols());
    for (std::size_t p = 0; p < h.rows(); ++p) {
        const double th = theta[network.paths[p].od_index];
        for (std::size_t k = 0; k < h.cols(); ++k)
            next(p, k) = std::max(0.0, h(p, k) - step * (psi(p, k) - th));
    }
    return next;
}

GapReport gap_report(const PathFlowTrajectory& h, const EffectiveDelayField& psi, const Network& network,
                     const TimeGrid& grid) {
    if (!psi.same_shape(h.rows(), h.cols()))
        throw std::invalid_argument("gap_report: flow and effective delay dimensions disagree");
    const DemandState demand = cumulative_demand(h, network, grid);

    GapReport gap;
    const std::size_t n_od = network.od_pairs.size();
    gap.theta.resize(n_od);
    gap.multipliers.resize(n_od);
    gap.min_effective_delay.resize(n_od);
    for (std::size_t od = 0; od < n_od; ++od) {
        gap.theta[od] = inverse_demand_value(network.od_pairs[od].inverse_demand, demand.terminal[od]);
        gap.multipliers[od] = -gap.theta[od];
        gap.min_effective_delay[od] = min_effective_delay(psi, network, od);
    }

    double weighted = 0.0;
    for (std::size_t p = 0; p < h.rows(); ++p) {
        const double th = gap.theta[network.paths[p].od_index];
        for (std::size_t k = 0; k < h.cols(); ++k) {
            const double rho = psi(p, k) - th;
            gap.dual = std::max(gap.dual, -rho);
            weighted += h(p, k) * rho * grid.dt();
        }
    }
    const double total = demand.total();
    gap.complementarity = total > 0.0 ? weighted / total : 0.0;
    return gap;
}

double support_residual(const PathFlowTrajectory& h, const EffectiveDelayField& psi, const std::vector<double>& theta,
                        const Network& network, double tol_flow) {
    double worst = 0.0;
    for (std::size_t p = 0; p < h.rows(); ++p) {
        const double th = theta[network.paths[p].od_index];
        for (std::size_t k = 0; k < h.cols(); ++k)
            if (h(p, k) > tol_flow)
                worst = std::max(worst, std::abs(psi(p, k) - th));
    }
    return worst;
}

std::size_t Solution::clamp_count() const {
    std::size_t n = 0;
    for (auto c : link_clamp_counts)
        n += c;
    return n;
}

PathFlowTrajectory default_initial_flows(const Problem& problem) {
    const Network& net = problem.network;
    const TimeGrid& grid = problem.grid;
    PathFlowTrajectory zero(net.paths.size(), grid.n_bins());
    const Evaluation free_flow = evaluate(problem, zero);

    PathFlowTrajectory h0(net.paths.size(), grid.n_bins());
    for (std::size_t od = 0; od < net.od_pairs.size(); ++od) {
        const double q0 = forward_demand_value(net.od_pairs[od].inverse_demand,
                                               min_effective_delay(free_flow.effective_delay, net, od));
        if (q0 <= 0.0)
            continue;
        const double target = problem.penalties[od].desired_arrival;
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        const auto paths = net.paths_of(od);
        for (std::size_t p : paths)
            for (std::size_t k = 0; k < grid.n_bins(); ++k)
                if (free_flow.loading.arrival(p, k) <= target)
                    cells.emplace_back(p, k);
        if (cells.empty())
            for (std::size_t p : paths)
                for (std::size_t k = 0; k < grid.n_bins(); ++k)
                    cells.emplace_back(p, k);
        const double rate = q0 / (static_cast<double>(cells.size()) * grid.dt());
        for (auto [p, k] : cells)
            h0(p, k) = rate;
    }
    return h0;
}

namespace {

double default_tol_flow(const DemandState& demand, const TimeGrid& grid) {
    return 1e-6 * demand.total() / grid.horizon();
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

double relative_change(const PathFlowTrajectory& from, const PathFlowTrajectory& to) {
    double diff = 0.0;
    for (std::size_t i = 0; i < from.data().size(); ++i) {
        const double d = to.data()[i] - from.data()[i];
        diff += d * d;
    }
    diff = std::sqrt(diff);
    if (diff == 0.0)
        return 0.0;
    const double base = l2_norm(from.data());
    return base > 0.0 ? diff / base : std::numeric_limits<double>::infinity();
}

Solution assemble(const Problem& problem, const PathFlowTrajectory& h, Evaluation ev, const SolverConfig& config) {
    Solution s;
    s.flows = h;
    s.gap = gap_report(h, ev.effective_delay, problem.network, problem.grid);
    s.tol_flow = config.tol_flow.value_or(default_tol_flow(ev.demand, problem.grid));
    s.support_residual = support_residual(h, ev.effective_delay, ev.theta, problem.network, s.tol_flow);
    s.demand = std::move(ev.demand);
    s.effective_delay = std::move(ev.effective_delay);
    s.link_clamp_counts.reserve(ev.loading.links.size());
    for (const auto& l : ev.loading.links)
        s.link_clamp_counts.push_back(l.clamp_count);
    s.max_arrival_time = ev.loading.max_arrival_time();
    for (std::size_t p = 0; p < h.rows(); ++p)
        for (std::size_t k = 0; k < h.cols(); ++k)
            if (h(p, k) > 0.0 && ev.loading.arrival(p, k) > problem.grid.tf()) {
                s.late_arrival_mass += h(p, k) * problem.grid.dt();
                ++s.late_cohorts;
            }
    return s;
}

}  // namespace

Solution certify(const Problem& problem, const PathFlowTrajectory& h, const SolverConfig& config) {
    return assemble(problem, h, evaluate(problem, h), config);
}

Solution solve_due(const Problem& problem, const SolverConfig& config,
                   const std::optional<PathFlowTrajectory>& initial) {
    validate(problem);
    validate(config);
    const std::size_t n_paths = problem.network.paths.size();
    const std::size_t n_bins = problem.grid.n_bins();

    PathFlowTrajectory h;
    if (initial) {
        if (!initial->same_shape(n_paths, n_bins))
            throw std::invalid_argument("solve_due: initial flow matrix has the wrong shape");
        if (!all_finite(initial->data()))
            throw std::invalid_argument("solve_due: initial flow matrix is not finite");
        h = project_nonnegative(*initial);
    } else {
        h = default_initial_flows(problem);
    }

    double step = config.step_size;
    double previous_change = std::numeric_limits<double>::infinity();
    std::vector<IterationRecord> trace;
    trace.reserve(std::min<std::size_t>(config.max_iters, 100000));

    for (std::size_t it = 1;; ++it) {
        Evaluation ev = evaluate(problem, h);
        if (!all_finite(ev.effective_delay.data()) || !all_finite(ev.theta))
            throw NumericFailure("solve_due: non-finite effective delay or inverse demand at iteration " +
                                     std::to_string(it),
                                 it);
        const GapReport gap = gap_report(h, ev.effective_delay, problem.network, problem.grid);
        const double tol_flow = config.tol_flow.value_or(default_tol_flow(ev.demand, problem.grid));
        const double support = support_residual(h, ev.effective_delay, ev.theta, problem.network, tol_flow);

        PathFlowTrajectory next = fixed_point_step(h, ev.effective_delay, ev.theta, step, problem.network);
        if (!all_finite(next.data()))
            throw NumericFailure("solve_due: non-finite flow at iteration " + std::to_string(it), it);
        const double change = relative_change(h, next);
        trace.push_back({it, gap.dual, gap.complementarity, support, change, step});

        const double residual = std::max({gap.dual, gap.complementarity, support});
        const bool converged = residual <= config.tol_gap && change <= config.tol_change;
        if (converged || it >= config.max_iters) {
            Solution s = assemble(problem, h, std::move(ev), config);
            s.iterations = it;
            s.converged = converged;
            s.trace = std::move(trace);
            return s;
        }

        // Successive changes shrink while the step is a contraction; growth means oscillation.
        if (config.step_halving && change > previous_change)
            step *= 0.5;
        previous_change = change;
        h = std::move(next);
    }
}

}  // namespace due
