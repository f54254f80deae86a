#include "due/loading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace due {

CumulativeCurve::CumulativeCurve(double spread) : spread_(spread) {
    if (!(spread >= 0.0))
        throw std::invalid_argument("cumulative curve: spread must be >= 0");
}

void CumulativeCurve::credit(double time, double mass) {
    if (!times_.empty() && time < times_.back())
        throw std::logic_error("cumulative curve: credits must arrive in nondecreasing time order");
    if (!(mass >= 0.0))
        throw std::logic_error("cumulative curve: negative mass");
    times_.push_back(time);
    masses_.push_back(mass);
    prefix_.push_back(total() + mass);
}

double CumulativeCurve::at(double t) const {
    // Credits starting at or before t - spread have fully ramped in.
    const auto full = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t - spread_) - times_.begin());
    double count = full == 0 ? 0.0 : prefix_[full - 1];
    for (std::size_t i = full; i < times_.size() && times_[i] <= t; ++i)
        count += spread_ > 0.0 ? masses_[i] * (t - times_[i]) / spread_ : masses_[i];
    return count;
}

std::size_t LoadingResult::clamp_count() const {
    std::size_t n = 0;
    for (const auto& l : links)
        n += l.clamp_count;
    return n;
}

double LoadingResult::max_arrival_time() const {
    double m = -INFINITY;
    for (double v : arrival.data())
        m = std::max(m, v);
    return m;
}

namespace {

struct Cohort {
    double time;             // entry time on the current link
    std::size_t link_rank;   // rank of the current link id in lexicographic order
    std::size_t path_rank;   // rank of the path id in lexicographic order
    std::size_t path;
    std::size_t bin;
    std::size_t hop;         // position of the current link along the path
};

struct LaterFirst {
    bool operator()(const Cohort& a, const Cohort& b) const {
        if (a.time != b.time)
            return a.time > b.time;
        if (a.link_rank != b.link_rank)
            return a.link_rank > b.link_rank;
        if (a.path_rank != b.path_rank)
            return a.path_rank > b.path_rank;
        return a.bin > b.bin;
    }
};

template <class Key>
std::vector<std::size_t> lexicographic_ranks(std::size_t n, Key key) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r)
        rank[order[r]] = r;
    return rank;
}

}  // namespace

LoadingResult propagate_path_cohorts(const Network& network, const TimeGrid& grid, const PathFlowTrajectory& h,
                                     const LoadingOptions& options) {
    const std::size_t n_paths = network.paths.size();
    const std::size_t n_bins = grid.n_bins();
    if (!h.same_shape(n_paths, n_bins))
        throw std::invalid_argument("propagate_path_cohorts: flow matrix is " + std::to_string(h.rows()) + "x" +
                                    std::to_string(h.cols()) + ", expected " + std::to_string(n_paths) + "x" +
                                    std::to_string(n_bins));
    for (double v : h.data())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("propagate_path_cohorts: departure rates must be finite and nonnegative");

    const double limit = grid.t0() + options.horizon_multiple * grid.horizon();
    const auto link_rank =
        lexicographic_ranks(network.links.size(), [&](std::size_t i) -> const std::string& { return network.links[i].id; });
    const auto path_rank =
        lexicographic_ranks(n_paths, [&](std::size_t i) -> const std::string& { return network.paths[i].id; });

    LoadingResult result;
    result.links.assign(network.links.size(), LinkState{CumulativeCurve(grid.dt()), CumulativeCurve(grid.dt()), {}, 0});
    result.arrival = ArrivalTimeField(n_paths, n_bins);
    result.delay = PathDelayField(n_paths, n_bins);

    std::vector<double> last_exit(network.links.size(), -INFINITY);
    std::priority_queue<Cohort, std::vector<Cohort>, LaterFirst> pending;
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t k = 0; k < n_bins; ++k)
            pending.push({grid.bin_start(k), link_rank[network.paths[p].links.front()], path_rank[p], p, k, 0});

    while (!pending.empty()) {
        const Cohort c = pending.top();
        pending.pop();
        const Path& path = network.paths[c.path];
        const std::size_t a = path.links[c.hop];
        const Link& link = network.links[a];
        LinkState& state = result.links[a];

        const double mass = h(c.path, c.bin) * grid.dt();
        double occupancy = std::max(0.0, state.entries.at(c.time) - state.exits.at(c.time));
        if (options.probe == CohortProbe::cohort_average)
            occupancy += 0.5 * mass;
        const double raw_exit = c.time + link.free_flow_time + link.congestion_slope * occupancy;
        double exit = raw_exit;
        if (last_exit[a] > raw_exit) {
            exit = last_exit[a];
            ++state.clamp_count;
        }
        last_exit[a] = exit;

        if (!(exit <= limit))
            throw DivergenceError("loading diverged: cohort of path '" + path.id + "' departing at t=" +
                                  std::to_string(grid.bin_start(c.bin)) + " leaves link '" + link.id + "' at t=" +
                                  std::to_string(exit) + ", past the limit " + std::to_string(limit));

        state.entries.credit(c.time, mass);
        state.exits.credit(exit, mass);
        state.exit_times.push_back(exit);

        if (c.hop + 1 < path.links.size()) {
            pending.push({exit, link_rank[path.links[c.hop + 1]], c.path_rank, c.path, c.bin, c.hop + 1});
        } else {
            result.arrival(c.path, c.bin) = exit;
            result.delay(c.path, c.bin) = exit - grid.bin_start(c.bin);
        }
    }
    return result;
}

const PathDelayField& path_delay_field(const LoadingResult& result) { return result.delay; }

}  // namespace due
