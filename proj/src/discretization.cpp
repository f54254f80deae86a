#include "due/discretization.hpp"

#include <cmath>

namespace due {

TimeGrid::TimeGrid(double t0, double tf, std::size_t n_bins) : t0_(t0), tf_(tf), n_bins_(n_bins), dt_(0.0) {
    if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0))
        throw std::invalid_argument("time grid: horizon must satisfy tf > t0 (got t0=" + std::to_string(t0) +
                                    ", tf=" + std::to_string(tf) + ")");
    if (n_bins == 0)
        throw std::invalid_argument("time grid: n_bins must be at least 1");
    dt_ = (tf - t0) / static_cast<double>(n_bins);
}

TimeGrid make_grid(double t0, double tf, std::size_t n_bins) { return TimeGrid(t0, tf, n_bins); }

double integrate_left_riemann(std::span<const double> values, const TimeGrid& grid) {
    if (values.size() != grid.n_bins())
        throw std::invalid_argument("integrate_left_riemann: trajectory has " + std::to_string(values.size()) +
                                    " values but the grid has " + std::to_string(grid.n_bins()) + " bins");
    double sum = 0.0;
    for (double v : values)
        sum += v * grid.dt();
    return sum;
}

double integrate_left_riemann(const BinTrajectory& traj) { return integrate_left_riemann(traj.values, traj.grid); }

}  // namespace due
