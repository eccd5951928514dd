#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dprob/error.hpp"
#include "dprob/walks.hpp"

using namespace dprob;
using Catch::Matchers::WithinAbs;

namespace {

WalkConfig drift_walk(std::uint64_t replicates) {
    WalkConfig cfg{Distribution::table({0.7, 0.0, 0.3}, -1)};
    cfg.replicates = replicates;
    cfg.horizon = 200;
    return cfg;
}

}  // namespace

TEST_CASE("path statistics on a hand-checked path") {
    // steps +1, +1, -1, -1, -1, +1: S = 1, 2, 1, 0, -1, 0
    const auto up = Distribution::point_mass(1);
    CounterRng rng(0);
    const auto s = simulate_path(up, 4, rng);
    CHECK(s.eta == 4);
    CHECK(s.first_max == 4);
    const auto down = Distribution::point_mass(-1);
    const auto t = simulate_path(down, 4, rng);
    CHECK(t.eta == 0);
    CHECK(t.first_max == 0);
}

TEST_CASE("point mass -1 steps give all-zero histograms") {
    WalkConfig cfg{Distribution::point_mass(-1)};
    cfg.replicates = 1000;
    const auto stats = simulate_walk(cfg);
    CHECK(stats.eta_hist[0] == 1000);
    CHECK(stats.first_max_hist[0] == 1000);
    const auto eq = check_equidistribution(cfg, stats);
    CHECK(eq.pass);
    for (const auto& c : eq.checks)
        CHECK(c.diff == 0.0);
}

TEST_CASE("E[eta] matches exact dynamic programming") {
    // sum_{n=1}^{200} P(S_n > 0) for +-1 steps with P(+1) = 0.3
    const auto stats = simulate_walk(drift_walk(200'000));
    const auto& w = stats.weighted_sums.at(0);
    CHECK(w.order == 1);
    CHECK(std::abs(w.eta - 1.8749999850494357) <= 4 * w.se_eta);
    CHECK(std::abs(w.first_max - 1.8749999850494357) <= 4 * w.se_first_max);
}

TEST_CASE("m_n estimates match exact P(S_n > 0) at small n") {
    const auto stats = simulate_walk(drift_walk(200'000));
    // P(S_1 > 0) = 0.3, P(S_3 > 0) = 0.3^3 + 3 * 0.3^2 * 0.7
    CHECK(std::abs(stats.m_n[0].m - 0.3) <= 4 * stats.m_n[0].se);
    CHECK(std::abs(stats.m_n[2].m - 0.216) <= 4 * stats.m_n[2].se);
    CHECK(stats.m_n.back().m < 1e-4);
}

TEST_CASE("results do not depend on the thread count") {
    auto a = drift_walk(50'000);
    a.threads = 1;
    auto b = a;
    b.threads = 5;
    const auto sa = simulate_walk(a);
    const auto sb = simulate_walk(b);
    CHECK(sa.eta_hist == sb.eta_hist);
    CHECK(sa.first_max_hist == sb.first_max_hist);
    CHECK(check_equidistribution(a, sa).checks[1].se_eta ==
          check_equidistribution(b, sb).checks[1].se_eta);
}

TEST_CASE("zero-drift walk fails the convergence gate") {
    WalkConfig cfg{Distribution::table({0.5, 0.0, 0.5}, -1)};
    cfg.replicates = 5000;
    try {
        check_equidistribution(cfg);
        FAIL("gate did not fire");
    } catch (const GateError& e) {
        CHECK(e.value() > 0.3);
        CHECK(e.threshold() == 1e-4);
    }
}

TEST_CASE("empirical weighted sum") {
    // V = 2 with certainty: sum_n (n+1) 1{2 > n+1} = 1 for N = 2, and E[V] for N = 1
    const std::vector<std::uint64_t> hist{0, 0, 10};
    CHECK_THAT(empirical_weighted_sum(hist, 10, 1), WithinAbs(2.0, 1e-15));
    CHECK_THAT(empirical_weighted_sum(hist, 10, 2), WithinAbs(1.0, 1e-15));
}

TEST_CASE("config validation") {
    WalkConfig cfg{Distribution::poisson(1.0)};
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    WalkConfig z{Distribution::point_mass(1)};
    z.replicates = 0;
    CHECK_THROWS_AS(z.validate(), InvalidArgument);
}
