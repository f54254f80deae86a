#include <doctest.h>

#include <algorithm>
#include <random>

#include "due/scenario.hpp"
#include "due/solver.hpp"
#include "test_support.hpp"

using namespace due;
using due::testing::scenario;

namespace {

double relative_gap(double x, double y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300}); }

}  // namespace

TEST_CASE("min_effective_delay") {
    const Network net = due::testing::parallel_network(3, 1.0, 0.0, 10, 1);
    SUBCASE("constant field") { CHECK(min_effective_delay(EffectiveDelayField(3, 16, 4.25), net, 0) == 4.25); }
    SUBCASE("unique minimum") {
        EffectiveDelayField psi(3, 16, 9.0);
        psi(2, 11) = 3.0;
        CHECK(min_effective_delay(psi, net, 0) == 3.0);
    }
    SUBCASE("random fields against an exhaustive scan") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(1.0, 30.0);
        for (int trial = 0; trial < 100; ++trial) {
            EffectiveDelayField psi(3, 16);
            for (double& v : psi.data()) v = u(rng);
            double scan = INFINITY;
            for (std::size_t p = 0; p < 3; ++p)
                for (std::size_t k = 0; k < 16; ++k)
                    if (psi(p, k) < scan) scan = psi(p, k);
            CHECK(min_effective_delay(psi, net, 0) == scan);
        }
    }
}

TEST_CASE("projection and fixed-point step") {
    PathBinMatrix<FlowTag> g(1, 2);
    g(0, 0) = -1.0;
    g(0, 1) = 2.0;
    const auto p = project_nonnegative(g);
    CHECK(p(0, 0) == 0.0);
    CHECK(p(0, 1) == 2.0);
    CHECK(project_nonnegative(p) == p);
    CHECK(project_nonnegative(PathFlowTrajectory(2, 3, -4.0)) == PathFlowTrajectory(2, 3, 0.0));

    const Network net = due::testing::parallel_network(1, 1.0, 0.0, 10, 1);
    CHECK(fixed_point_step(PathFlowTrajectory(1, 1, 0.0), EffectiveDelayField(1, 1, 5.0), {10.0}, 0.1, net)(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fixed_point_step(PathFlowTrajectory(1, 1, 1.0), EffectiveDelayField(1, 1, 30.0), {10.0}, 0.1, net)(0, 0) == 0.0);
    const PathFlowTrajectory h(1, 4, 3.0);
    CHECK(fixed_point_step(h, EffectiveDelayField(1, 4, 7.0), {7.0}, 0.1, net) == h);
}

TEST_CASE("gap residuals") {
    // One path, 10 unit bins, Theta(Q) = 15 - Q; 10 vehicles in bin 0 gives Theta = 5.
    const Network net = due::testing::parallel_network(1, 1.0, 0.0, 15, 1);
    const TimeGrid g(0, 10, 10);
    PathFlowTrajectory h(1, 10);
    h(0, 0) = 10.0;
    EffectiveDelayField psi(1, 10, 7.0);

    psi(0, 0) = 5.0;
    auto r = gap_report(h, psi, net, g);
    CHECK(r.theta[0] == 5.0);
    CHECK(r.multipliers[0] == -5.0);
    CHECK(r.dual == 0.0);
    CHECK(r.complementarity == 0.0);
    CHECK(support_residual(h, psi, r.theta, net, 1e-9) == 0.0);

    psi(0, 0) = 5.5;
    r = gap_report(h, psi, net, g);
    CHECK(r.complementarity == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.dual == 0.0);
    CHECK(support_residual(h, psi, r.theta, net, 1e-9) == doctest::Approx(0.5).epsilon(1e-15));

    psi(0, 3) = 3.0;
    r = gap_report(h, psi, net, g);
    CHECK(r.dual == 2.0);
    CHECK(r.min_effective_delay[0] == 3.0);

    r = gap_report(PathFlowTrajectory(1, 10), EffectiveDelayField(1, 10, 20.0), net, g);
    CHECK(r.complementarity == 0.0);
    CHECK(r.dual == 0.0);
}

TEST_CASE("choke scenario stops at the first iterate") {
    const Scenario s = load_scenario(scenario("choke.json"));
    const Network& net = s.problem.network;
    const auto sol = solve_due(s.problem, s.solver, PathFlowTrajectory(net.paths.size(), s.problem.grid.n_bins()));
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK(sol.demand.terminal[0] == 0.0);
    for (double v : sol.flows.data()) CHECK(v == 0.0);
    // Default start is also zero: a is below every free-flow effective delay.
    const auto from_default = solve_due(s.problem, s.solver);
    CHECK(from_default.converged);
    CHECK(from_default.demand.terminal[0] == 0.0);
}

TEST_CASE("frozen delays reach the closed form") {
    const Scenario s = load_scenario(scenario("frozen.json"));
    const auto sol = solve_due(s.problem, s.solver);
    REQUIRE(sol.converged);
    CHECK(sol.demand.terminal[0] == doctest::Approx(100.0).epsilon(1e-5));
    const double psi_min = sol.gap.min_effective_delay[0];
    CHECK(psi_min == doctest::Approx(10.0).epsilon(1e-12));
    double on = 0.0, all = 0.0;
    for (std::size_t k = 0; k < s.problem.grid.n_bins(); ++k) {
        all += sol.flows(0, k);
        if (sol.effective_delay(0, k) <= psi_min + 1e-9) on += sol.flows(0, k);
    }
    CHECK(on / all > 0.999);
}

TEST_CASE("identical parallel links give equal rows") {
    const Scenario s = load_scenario(scenario("parallel2_8.json"));
    const auto sol = solve_due(s.problem, s.solver);
    REQUIRE(sol.converged);
    REQUIRE(sol.flows.rows() == 2);
    for (std::size_t k = 0; k < sol.flows.cols(); ++k) {
        const double a = sol.flows(0, k), b = sol.flows(1, k);
        CHECK(std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1e-12}));
    }
}

TEST_CASE("converged flows are a fixed point of the step") {
    const Scenario s = load_scenario(scenario("parallel2_8.json"));
    const auto sol = solve_due(s.problem, s.solver);
    REQUIRE(sol.converged);
    const auto next = fixed_point_step(sol.flows, sol.effective_delay, sol.gap.theta, s.solver.step_size, s.problem.network);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < next.data().size(); ++i) {
        num += std::pow(next.data()[i] - sol.flows.data()[i], 2);
        den += std::pow(sol.flows.data()[i], 2);
    }
    CHECK(std::sqrt(num / den) <= s.solver.tol_change);
    CHECK(sol.trace.size() == sol.iterations);
    CHECK(relative_gap(sol.demand.terminal[0], 66.666666) < 1e-4);
}

TEST_CASE("certify agrees with the solver's own report") {
    const Scenario s = load_scenario(scenario("parallel2_8.json"));
    const auto sol = solve_due(s.problem, s.solver);
    const auto again = certify(s.problem, sol.flows, s.solver);
    CHECK(again.gap.dual == sol.gap.dual);
    CHECK(again.gap.complementarity == sol.gap.complementarity);
    CHECK(again.support_residual == sol.support_residual);
    CHECK(again.demand.terminal == sol.demand.terminal);
}

TEST_CASE("not converging within max_iters is reported, not hidden") {
    Scenario s = load_scenario(scenario("parallel2_8.json"));
    s.solver.max_iters = 5;
    const auto sol = solve_due(s.problem, s.solver);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 5);
}

TEST_CASE("step halving still reaches the frozen equilibrium") {
    Scenario s = load_scenario(scenario("frozen.json"));
    s.solver.step_size = 1.0;
    s.solver.step_halving = true;
    const auto sol = solve_due(s.problem, s.solver);
    CHECK(sol.converged);
    CHECK(sol.demand.terminal[0] == doctest::Approx(100.0).epsilon(1e-5));
    CHECK(sol.trace.back().step_size < 1.0);
}

TEST_CASE("config validation") {
    SolverConfig c;
    c.step_size = 0.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.max_iters = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = {};
    c.tol_gap = -1.0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("trips finishing after tf are flagged") {
    const Scenario s = load_scenario(scenario("frozen.json"));  // one link, alpha = 10, grid [0, 16] in 32 bins
    PathFlowTrajectory h(1, 32);
    h(0, 4) = 2.0;   // arrives at 12
    h(0, 20) = 1.0;  // arrives at 20
    h(0, 30) = 4.0;  // arrives at 25
    const auto sol = certify(s.problem, h, s.solver);
    CHECK(sol.late_cohorts == 2);
    CHECK(sol.late_arrival_mass == doctest::Approx((1.0 + 4.0) * 0.5).epsilon(1e-15));
    CHECK(sol.max_arrival_time == doctest::Approx(25.5).epsilon(1e-15));
}
