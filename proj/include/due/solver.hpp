#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "due/demand.hpp"
#include "due/discretization.hpp"
#include "due/effective_delay.hpp"
#include "due/loading.hpp"
#include "due/network.hpp"

namespace due {

/// A NaN or infinity showed up during the iteration.
class NumericFailure : public std::runtime_error {
  public:
    NumericFailure(const std::string& what, std::size_t iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    std::size_t iteration() const { return iteration_; }

  private:
    std::size_t iteration_;
};

/// Everything needed to evaluate the effective delay operator for a flow.
struct Problem {
    Network network;
    TimeGrid grid;
    std::vector<SchedulePenaltySpec> penalties;  // one per OD pair
    LoadingOptions loading;
};

/// Throws std::invalid_argument on inconsistent sizes or bad penalty parameters.
void validate(const Problem& problem);

struct SolverConfig {
    double step_size = 0.1;
    double tol_gap = 1e-6;
    double tol_change = 1e-6;
    std::size_t max_iters = 20000;
    bool step_halving = false;
    /// Support threshold; defaults to 1e-6 * total demand / horizon at the certified iterate.
    std::optional<double> tol_flow;
};

void validate(const SolverConfig& config);

/// Everything the pipeline derives from one flow matrix.
struct Evaluation {
    LoadingResult loading;
    EffectiveDelayField effective_delay;
    DemandState demand;
    std::vector<double> theta;  // Theta_ij(Q_ij(tf)) per OD pair
};

Evaluation evaluate(const Problem& problem, const PathFlowTrajectory& h);

struct GapReport {
    /// max over (p, k) of max(0, Theta_ij - Psi_p(t_k)).
    double dual = 0.0;
    /// sum_{p,k} h (Psi - Theta) dt divided by total demand; 0 when demand is 0.
    double complementarity = 0.0;
    std::vector<double> theta;
    /// lambda_ij = -Theta_ij(Q(tf)); the costate of the cumulative demand.
    std::vector<double> multipliers;
    /// v_ij, the minimum effective delay over the OD's paths and bins.
    std::vector<double> min_effective_delay;
};

/// Discrete essential infimum: min over p in P_od and all bins of Psi_p(t_k).
double min_effective_delay(const EffectiveDelayField& psi, const Network& network, std::size_t od);

/// Elementwise max(0, g).
PathFlowTrajectory project_nonnegative(const PathBinMatrix<FlowTag>& g);

/// h'_p(t_k) = max(0, h_p(t_k) - step * (Psi_p(t_k) - Theta_ij)) for p in P_ij.
PathFlowTrajectory fixed_point_step(const PathFlowTrajectory& h, const EffectiveDelayField& psi,
                                    const std::vector<double>& theta, double step, const Network& network);

GapReport gap_report(const PathFlowTrajectory& h, const EffectiveDelayField& psi, const Network& network,
                     const TimeGrid& grid);

/// Largest |Psi - Theta| over bins whose flow exceeds tol_flow (0 when no bin does).
double support_residual(const PathFlowTrajectory& h, const EffectiveDelayField& psi, const std::vector<double>& theta,
                        const Network& network, double tol_flow);

struct IterationRecord {
    std::size_t iteration = 0;
    double dual = 0.0;
    double complementarity = 0.0;
    double support = 0.0;
    double change = 0.0;
    double step_size = 0.0;
};

struct Solution {
    PathFlowTrajectory flows;
    DemandState demand;
    EffectiveDelayField effective_delay;
    GapReport gap;
    double support_residual = 0.0;
    double tol_flow = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> trace;

    std::vector<std::size_t> link_clamp_counts;
    double max_arrival_time = 0.0;
    /// Vehicles (and cohorts) that depart with positive flow but arrive after tf.
    double late_arrival_mass = 0.0;
    std::size_t late_cohorts = 0;
    std::size_t clamp_count() const;
};

/// Initial flow: per OD, the demand priced at the cheapest free-flow effective
/// delay, spread evenly over (path, bin) pairs that arrive no later than T_A
/// at free flow, or over all pairs of the OD when none does.
PathFlowTrajectory default_initial_flows(const Problem& problem);

/// Evaluates h through the pipeline and fills every Solution field except the trace.
Solution certify(const Problem& problem, const PathFlowTrajectory& h, const SolverConfig& config);

/// Fixed-point projection iteration h <- max(0, h - step (Psi(h) - Theta(Q(h)))).
/// Stops once dual, complementarity and support residuals are all <= tol_gap and
/// the relative L2 change of h is <= tol_change; the returned flows are the
/// iterate those residuals were measured at.
Solution solve_due(const Problem& problem, const SolverConfig& config,
                   const std::optional<PathFlowTrajectory>& initial = std::nullopt);

}  // namespace due
