#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "due/discretization.hpp"
#include "due/network.hpp"

namespace due {

/// Raised when a cohort's arrival time runs past the divergence horizon.
class DivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Piecewise-linear nondecreasing cumulative count built from cohort
/// packets. A credit of mass m at time t ramps linearly from 0 at t to m at
/// t + spread, so the curve has breakpoints at every credit time and at every
/// credit time plus spread.
class CumulativeCurve {
  public:
    explicit CumulativeCurve(double spread = 0.0);

    /// Credit times must be nondecreasing and mass nonnegative.
    void credit(double time, double mass);

    /// Vehicles counted by time t.
    double at(double t) const;

    /// Mass credited so far, as if every ramp had completed.
    double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }
    std::size_t credits() const { return times_.size(); }
    double spread() const { return spread_; }

  private:
    double spread_;
    std::vector<double> times_;
    std::vector<double> masses_;
    std::vector<double> prefix_;  // prefix_[i] = masses_[0] + ... + masses_[i]
};

struct LinkState {
    CumulativeCurve entries;  // U_a
    CumulativeCurve exits;    // W_a
    /// Exit times in issue order; nondecreasing by construction of the clamp.
    std::vector<double> exit_times;
    /// Number of cohorts whose raw exit time was raised to keep FIFO.
    std::size_t clamp_count = 0;
};

struct ArrivalTag {};
/// Clock time tau_p(t_k) at which a unit departing path p in bin k arrives.
using ArrivalTimeField = PathBinMatrix<ArrivalTag>;

/// Which vehicle of a cohort the reported delay belongs to.
enum class CohortProbe {
    /// The first vehicle: the cohort sees only traffic that entered before it.
    leading_vehicle,
    /// The average vehicle of a cohort entering uniformly over its bin, which
    /// also finds half of its own cohort on the link ahead of it.
    cohort_average,
};

struct LoadingOptions {
    /// Arrivals later than t0 + horizon_multiple * (tf - t0) raise DivergenceError.
    double horizon_multiple = 10.0;
    CohortProbe probe = CohortProbe::cohort_average;
};

struct LoadingResult {
    std::vector<LinkState> links;  // aligned with Network::links
    ArrivalTimeField arrival;
    PathDelayField delay;

    std::size_t clamp_count() const;
    double max_arrival_time() const;
};

/// Dynamic network loading with the occupancy-based link delay model
/// D_a(x) = alpha_a + beta_a * x. Every (path, bin) pair is one cohort of
/// h_p(t_k)*dt vehicles entering the first link at t_k; cohorts are
/// processed in (time, link id, path id, bin) order and FIFO is enforced per
/// link by a running maximum on issued exit times.
LoadingResult propagate_path_cohorts(const Network& network, const TimeGrid& grid, const PathFlowTrajectory& h,
                                     const LoadingOptions& options = {});

/// D_p(t_k) = tau_p(t_k) - t_k.
const PathDelayField& path_delay_field(const LoadingResult& result);

}  // namespace due
