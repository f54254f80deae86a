#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "due/demand.hpp"
#include "due/discretization.hpp"
#include "due/solver.hpp"

namespace due::oracle {

/// An effective delay field that does not react to flow.
struct FrozenDelayInstance {
    EffectiveDelayField psi;
    std::vector<InverseDemandSpec> demand;  // per OD pair
    std::vector<std::size_t> path_od;       // OD index of each row of psi
    TimeGrid grid;
};

struct FrozenOdEquilibrium {
    double demand = 0.0;               // Q*
    double min_effective_delay = 0.0;  // Psi_min
    /// (path row, bin) cells attaining Psi_min; the only cells allowed to carry flow.
    std::vector<std::pair<std::size_t, std::size_t>> argmin_cells;
};

/// Closed form: Q* = max(0, (a - Psi_min)/b) per OD pair.
std::vector<FrozenOdEquilibrium> frozen_delay_equilibrium(const FrozenDelayInstance& instance);

/// The free-flow effective delay field of a problem, as a frozen instance.
/// Exact for networks where every beta is 0.
FrozenDelayInstance frozen_instance(const Problem& problem);

inline constexpr std::size_t kMaxBruteForceCells = 64;

struct BruteForceOptions {
    std::size_t iters = 50000;
    double initial_step = 5.0;  // alpha_0 in alpha_k = alpha_0 / sqrt(k + 1)
    std::size_t starts = 5;
    std::uint64_t seed = 20240611;
};

struct BruteForceResult {
    PathFlowTrajectory flows;
    double residual = 0.0;                // max(dual, |complementarity|) of the chosen run
    std::vector<double> start_residuals;  // one per start, in seed order
    std::vector<std::uint64_t> seeds;
    std::size_t best_start = 0;
};

/// Projected descent with diminishing steps from several seeded random
/// nonnegative starts; keeps the start with the smallest final residual.
/// Requires |paths| * n_bins <= kMaxBruteForceCells.
BruteForceResult brute_force_vi(const Problem& problem, const BruteForceOptions& options = {});

}  // namespace due::oracle
