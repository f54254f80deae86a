#include "due/effective_delay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace due {

void validate(const SchedulePenaltySpec& spec, const TimeGrid& grid) {
    if (!std::isfinite(spec.desired_arrival) || !(spec.desired_arrival < grid.tf()))
        throw std::invalid_argument("schedule penalty: desired arrival time T_A=" +
                                    std::to_string(spec.desired_arrival) + " must be finite and < tf=" +
                                    std::to_string(grid.tf()));
    if (!std::isfinite(spec.early_coef) || spec.early_coef < 0.0)
        throw std::invalid_argument("schedule penalty: gamma_early must be finite and >= 0");
    if (!std::isfinite(spec.late_coef) || spec.late_coef < 0.0)
        throw std::invalid_argument("schedule penalty: gamma_late must be finite and >= 0");
}

double schedule_penalty(const SchedulePenaltySpec& spec, double deviation) {
    return spec.early_coef * std::max(0.0, -deviation) + spec.late_coef * std::max(0.0, deviation);
}

namespace {

template <class SpecOf>
EffectiveDelayField build(const PathDelayField& delay, const TimeGrid& grid, SpecOf spec_of) {
    if (delay.cols() != grid.n_bins())
        throw std::invalid_argument("effective_delay_field: delay field has " + std::to_string(delay.cols()) +
                                    " bins, grid has " + std::to_string(grid.n_bins()));
    EffectiveDelayField psi(delay.rows(), delay.cols());
    for (std::size_t p = 0; p < delay.rows(); ++p) {
        const SchedulePenaltySpec& spec = spec_of(p);
        for (std::size_t k = 0; k < delay.cols(); ++k) {
            const double d = delay(p, k);
            if (!(d > 0.0))
                throw InvariantViolation("effective_delay_field: travel delay of path " + std::to_string(p) +
                                         " at bin " + std::to_string(k) + " is not strictly positive");
            const double t = grid.bin_start(k);
            psi(p, k) = d + schedule_penalty(spec, t + d - spec.desired_arrival);
        }
    }
    return psi;
}

}  // namespace

EffectiveDelayField effective_delay_field(const PathDelayField& delay, const SchedulePenaltySpec& spec,
                                          const TimeGrid& grid) {
    return build(delay, grid, [&](std::size_t) -> const SchedulePenaltySpec& { return spec; });
}

EffectiveDelayField effective_delay_field(const PathDelayField& delay, const Network& network,
                                          std::span<const SchedulePenaltySpec> per_od, const TimeGrid& grid) {
    if (delay.rows() != network.paths.size())
        throw std::invalid_argument("effective_delay_field: delay field rows do not match the path count");
    if (per_od.size() != network.od_pairs.size())
        throw std::invalid_argument("effective_delay_field: need one penalty spec per od pair");
    return build(delay, grid,
                 [&](std::size_t p) -> const SchedulePenaltySpec& { return per_od[network.paths[p].od_index]; });
}

}  // namespace due
