#include "due/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace due::oracle {

std::vector<FrozenOdEquilibrium> frozen_delay_equilibrium(const FrozenDelayInstance& instance) {
    std::vector<FrozenOdEquilibrium> out(instance.demand.size());
    for (std::size_t od = 0; od < out.size(); ++od) {
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < instance.psi.rows(); ++p)
            if (instance.path_od[p] == od)
                for (double v : instance.psi.row(p))
                    lowest = std::min(lowest, v);

        FrozenOdEquilibrium& eq = out[od];
        eq.min_effective_delay = lowest;
        const double a = instance.demand[od].intercept;
        const double b = instance.demand[od].slope;
        eq.demand = a <= lowest ? 0.0 : (a - lowest) / b;

        // Ties within a few ulps of the minimum count as argmin.
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(lowest);
        for (std::size_t p = 0; p < instance.psi.rows(); ++p)
            if (instance.path_od[p] == od)
                for (std::size_t k = 0; k < instance.psi.cols(); ++k)
                    if (instance.psi(p, k) <= lowest + slack)
                        eq.argmin_cells.emplace_back(p, k);
    }
    return out;
}

FrozenDelayInstance frozen_instance(const Problem& problem) {
    const Network& net = problem.network;
    PathFlowTrajectory zero(net.paths.size(), problem.grid.n_bins());
    const LoadingResult loading = propagate_path_cohorts(net, problem.grid, zero, problem.loading);

    FrozenDelayInstance inst{effective_delay_field(loading.delay, net, problem.penalties, problem.grid), {}, {},
                             problem.grid};
    for (const auto& od : net.od_pairs)
        inst.demand.push_back(od.inverse_demand);
    for (const auto& p : net.paths)
        inst.path_od.push_back(p.od_index);
    return inst;
}

namespace {

struct Pressure {
    EffectiveDelayField psi;
    std::vector<double> theta;
    double residual = 0.0;
};

// Recomputes demand and residuals here rather than through the solver so the
// two code paths stay independent.
Pressure pressure(const Problem& problem, const PathFlowTrajectory& h) {
    const Network& net = problem.network;
    const double dt = problem.grid.dt();
    const LoadingResult loading = propagate_path_cohorts(net, problem.grid, h, problem.loading);

    Pressure out;
    out.psi = effective_delay_field(loading.delay, net, problem.penalties, problem.grid);
    std::vector<double> q(net.od_pairs.size(), 0.0);
    for (std::size_t p = 0; p < h.rows(); ++p)
        for (double v : h.row(p))
            q[net.paths[p].od_index] += v * dt;
    out.theta.resize(q.size());
    double total = 0.0;
    for (std::size_t od = 0; od < q.size(); ++od) {
        const auto& spec = net.od_pairs[od].inverse_demand;
        out.theta[od] = spec.intercept - spec.slope * q[od];
        total += q[od];
    }

    double dual = 0.0;
    double comp = 0.0;
    for (std::size_t p = 0; p < h.rows(); ++p)
        for (std::size_t k = 0; k < h.cols(); ++k) {
            const double rho = out.psi(p, k) - out.theta[net.paths[p].od_index];
            dual = std::max(dual, -rho);
            comp += h(p, k) * rho * dt;
        }
    out.residual = std::max(dual, total > 0.0 ? std::abs(comp) / total : 0.0);
    return out;
}

}  // namespace

BruteForceResult brute_force_vi(const Problem& problem, const BruteForceOptions& options) {
    const Network& net = problem.network;
    const std::size_t rows = net.paths.size();
    const std::size_t cols = problem.grid.n_bins();
    if (rows * cols > kMaxBruteForceCells)
        throw std::invalid_argument("brute_force_vi: instance has " + std::to_string(rows * cols) +
                                    " path-bin cells, limit is " + std::to_string(kMaxBruteForceCells));
    if (options.starts == 0 || options.iters == 0 || !(options.initial_step > 0.0))
        throw std::invalid_argument("brute_force_vi: need at least one start, one iteration and a positive step");

    // Start scale: the largest demand an OD can ever carry, spread over its cells.
    std::vector<double> start_scale(rows);
    for (std::size_t p = 0; p < rows; ++p) {
        const auto& spec = net.od_pairs[net.paths[p].od_index].inverse_demand;
        const double n_paths = static_cast<double>(net.paths_of(net.paths[p].od_index).size());
        start_scale[p] = spec.intercept / spec.slope / (n_paths * problem.grid.horizon());
    }

    BruteForceResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < options.starts; ++s) {
        const std::uint64_t seed = options.seed + s;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        PathFlowTrajectory h(rows, cols);
        for (std::size_t p = 0; p < rows; ++p)
            for (std::size_t k = 0; k < cols; ++k)
                h(p, k) = unit(rng) * start_scale[p];

        for (std::size_t it = 0; it < options.iters; ++it) {
            const Pressure pr = pressure(problem, h);
            const double step = options.initial_step / std::sqrt(static_cast<double>(it + 1));
            for (std::size_t p = 0; p < rows; ++p) {
                const double th = pr.theta[net.paths[p].od_index];
                for (std::size_t k = 0; k < cols; ++k)
                    h(p, k) = std::max(0.0, h(p, k) - step * (pr.psi(p, k) - th));
            }
        }
        const double residual = pressure(problem, h).residual;
        best.start_residuals.push_back(residual);
        best.seeds.push_back(seed);
        if (residual < best.residual) {
            best.residual = residual;
            best.flows = h;
            best.best_start = s;
        }
    }
    return best;
}

}  // namespace due::oracle
