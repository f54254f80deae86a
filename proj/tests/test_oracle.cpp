#include <doctest.h>

#include "due/oracle.hpp"
#include "due/scenario.hpp"
#include "test_support.hpp"

using namespace due;
using due::testing::scenario;

namespace {

oracle::FrozenDelayInstance single_od(EffectiveDelayField psi, InverseDemandSpec demand) {
    const std::size_t rows = psi.rows(), cols = psi.cols();
    return {std::move(psi), {demand}, std::vector<std::size_t>(rows, 0), TimeGrid(0, static_cast<double>(cols), cols)};
}

}  // namespace

TEST_CASE("frozen closed form") {
    EffectiveDelayField psi(2, 8, 14.0);
    psi(1, 5) = 10.0;
    auto eq = oracle::frozen_delay_equilibrium(single_od(psi, {50.0, 0.4}));
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].demand == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(eq[0].min_effective_delay == 10.0);
    CHECK(eq[0].argmin_cells == std::vector<std::pair<std::size_t, std::size_t>>{{1, 5}});

    eq = oracle::frozen_delay_equilibrium(single_od(psi, {5.0, 0.4}));
    CHECK(eq[0].demand == 0.0);

    psi(0, 2) = 10.0;
    eq = oracle::frozen_delay_equilibrium(single_od(psi, {50.0, 0.4}));
    CHECK(eq[0].demand == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(eq[0].argmin_cells == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 5}});
}

TEST_CASE("frozen instance of the bundled scenario") {
    const Scenario s = load_scenario(scenario("frozen.json"));
    const auto eq = oracle::frozen_delay_equilibrium(oracle::frozen_instance(s.problem));
    CHECK(eq[0].min_effective_delay == 10.0);
    CHECK(eq[0].demand == doctest::Approx(100.0).epsilon(1e-15));
    // Arriving exactly at T_A = 15 after a 10 unit trip: departure at t = 5, bin 10 at dt = 0.5.
    CHECK(eq[0].argmin_cells == std::vector<std::pair<std::size_t, std::size_t>>{{0, 10}});
}

TEST_CASE("brute force matches the closed form on frozen delays") {
    const Scenario s = load_scenario(scenario("frozen.json"));
    const auto bf = oracle::brute_force_vi(s.problem, s.oracle);
    const auto q = cumulative_demand(bf.flows, s.problem.network, s.problem.grid);
    CHECK(q.terminal[0] == doctest::Approx(100.0).epsilon(1e-3));
    CHECK(bf.residual < 1e-6);
    CHECK(bf.start_residuals.size() == s.oracle.starts);
    CHECK(bf.seeds.size() == s.oracle.starts);
}

TEST_CASE("brute force on the choke case") {
    const Scenario s = load_scenario(scenario("choke.json"));
    const auto bf = oracle::brute_force_vi(s.problem, s.oracle);
    const auto q = cumulative_demand(bf.flows, s.problem.network, s.problem.grid);
    CHECK(q.terminal[0] < 1e-6);
}

TEST_CASE("brute force agrees with the solver on congested parallel links") {
    const Scenario s = load_scenario(scenario("parallel2_8.json"));
    const auto bf = oracle::brute_force_vi(s.problem, s.oracle);
    const auto sol = solve_due(s.problem, s.solver);
    REQUIRE(sol.converged);
    const double q_bf = cumulative_demand(bf.flows, s.problem.network, s.problem.grid).terminal[0];
    CHECK(bf.residual < 1e-4);
    CHECK(q_bf == doctest::Approx(sol.demand.terminal[0]).epsilon(1e-2));
}

TEST_CASE("brute force is reproducible from its seed") {
    Scenario s = load_scenario(scenario("parallel2_8.json"));
    s.oracle.iters = 2000;
    const auto a = oracle::brute_force_vi(s.problem, s.oracle);
    const auto b = oracle::brute_force_vi(s.problem, s.oracle);
    CHECK(a.flows == b.flows);
    CHECK(a.seeds == b.seeds);
    s.oracle.seed += 1;
    CHECK(oracle::brute_force_vi(s.problem, s.oracle).seeds != a.seeds);
}

TEST_CASE("brute force refuses large instances") {
    const Scenario s = load_scenario(scenario("parallel2.json"));  // 2 x 32 = 64 cells, at the cap
    Problem big = s.problem;
    big.grid = TimeGrid(0, 16, 33);
    CHECK_THROWS_AS(oracle::brute_force_vi(big), std::invalid_argument);
}
