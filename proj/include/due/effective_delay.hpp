#pragma once

#include <span>
#include <stdexcept>

#include "due/discretization.hpp"
#include "due/network.hpp"

namespace due {

/// Thrown when a field that must be strictly positive is not.
class InvariantViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Piecewise-linear schedule penalty around a desired arrival time.
struct SchedulePenaltySpec {
    double desired_arrival = 0.0;  // T_A, must be < tf
    double early_coef = 0.5;       // cost per unit time early
    double late_coef = 2.0;        // cost per unit time late
};

/// Checks T_A < tf (and finite) and nonnegative coefficients.
void validate(const SchedulePenaltySpec& spec, const TimeGrid& grid);

/// early_coef * max(0, -s) + late_coef * max(0, s), where s is arrival minus T_A.
double schedule_penalty(const SchedulePenaltySpec& spec, double deviation);

/// Psi_p(t_k) = D_p(t_k) + penalty(t_k + D_p(t_k) - T_A), one spec for all paths.
EffectiveDelayField effective_delay_field(const PathDelayField& delay, const SchedulePenaltySpec& spec,
                                          const TimeGrid& grid);

/// Same, with penalty parameters chosen per OD pair (`per_od[path.od_index]`).
EffectiveDelayField effective_delay_field(const PathDelayField& delay, const Network& network,
                                          std::span<const SchedulePenaltySpec> per_od, const TimeGrid& grid);

}  // namespace due
