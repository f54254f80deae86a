#pragma once

#include <vector>

#include "due/discretization.hpp"

namespace due {

struct Network;

/// Separable linear inverse demand Theta(Q) = a - b*Q with a > 0, b > 0.
struct InverseDemandSpec {
    double intercept = 0.0;  // a: cost at zero demand (choke price)
    double slope = 0.0;      // b: cost per vehicle

    bool operator==(const InverseDemandSpec&) const = default;
};

/// Throws std::invalid_argument unless a > 0 and b > 0 (both finite).
void validate(const InverseDemandSpec& spec);

/// Terminal cumulative demand Q_ij(tf), one entry per OD pair.
struct DemandState {
    std::vector<double> terminal;

    double total() const;
};

/// Explicit-Euler integration of dQ/dt = sum_{p in P_ij} h_p from Q(t0) = 0.
DemandState cumulative_demand(const PathFlowTrajectory& h, const Network& network, const TimeGrid& grid);

/// a - b*Q. Negative values are legal and mean the OD is priced out.
double inverse_demand_value(const InverseDemandSpec& spec, double demand);

/// max(0, (a - v)/b).
double forward_demand_value(const InverseDemandSpec& spec, double cost);

}  // namespace due
