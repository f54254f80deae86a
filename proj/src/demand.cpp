#include "due/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "due/network.hpp"

namespace due {

void validate(const InverseDemandSpec& spec) {
    if (!std::isfinite(spec.intercept) || !(spec.intercept > 0.0))
        throw std::invalid_argument("inverse demand intercept a must be finite and > 0");
    if (!std::isfinite(spec.slope) || !(spec.slope > 0.0))
        throw std::invalid_argument("inverse demand slope b must be finite and > 0");
}

double DemandState::total() const {
    double sum = 0.0;
    for (double q : terminal)
        sum += q;
    return sum;
}

DemandState cumulative_demand(const PathFlowTrajectory& h, const Network& network, const TimeGrid& grid) {
    if (!h.same_shape(network.paths.size(), grid.n_bins()))
        throw std::invalid_argument("cumulative_demand: flow matrix is " + std::to_string(h.rows()) + "x" +
                                    std::to_string(h.cols()) + ", expected " + std::to_string(network.paths.size()) +
                                    "x" + std::to_string(grid.n_bins()));
    for (double v : h.data())
        if (!(v >= 0.0))
            throw std::invalid_argument("cumulative_demand: departure rates must be nonnegative");

    DemandState state;
    state.terminal.assign(network.od_pairs.size(), 0.0);
    // Q_ij(t_{k+1}) = Q_ij(t_k) + dt * sum_p h_p(t_k), stepped bin by bin.
    for (std::size_t k = 0; k < grid.n_bins(); ++k)
        for (std::size_t p = 0; p < network.paths.size(); ++p)
            state.terminal[network.paths[p].od_index] += h(p, k) * grid.dt();
    return state;
}

double inverse_demand_value(const InverseDemandSpec& spec, double demand) {
    if (!(demand >= 0.0))
        throw std::invalid_argument("inverse_demand_value: demand must be nonnegative");
    return spec.intercept - spec.slope * demand;
}

double forward_demand_value(const InverseDemandSpec& spec, double cost) {
    return std::max(0.0, (spec.intercept - cost) / spec.slope);
}

}  // namespace due
