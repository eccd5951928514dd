#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dprob/distribution.hpp"
#include "dprob/error.hpp"

using namespace dprob;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<Distribution> family() {
    return {Distribution::bernoulli(0.3),
            Distribution::binomial(10, 0.3),
            Distribution::geometric(0.5),
            Distribution::geometric(0.05),
            Distribution::poisson(1.0),
            Distribution::poisson(30.0),
            Distribution::negative_binomial(2.0, 0.5),
            Distribution::negative_binomial(0.5, 0.3),
            Distribution::table({0.2, 0.3, 0.5}),
            Distribution::table({0.7, 0.0, 0.3}, -1),
            Distribution::point_mass(4)};
}

}  // namespace

TEST_CASE("closed-form pmf values") {
    CHECK_THAT(Distribution::poisson(1.0).pmf(0), WithinRel(std::exp(-1.0), 1e-15));
    CHECK_THAT(Distribution::poisson(2.0).pmf(3), WithinRel(8.0 / 6.0 * std::exp(-2.0), 1e-14));
    CHECK_THAT(Distribution::binomial(10, 0.3).pmf(3), WithinRel(120 * 0.027 * std::pow(0.7, 7), 1e-13));
    CHECK_THAT(Distribution::geometric(0.25).pmf(2), WithinRel(0.25 * 0.75 * 0.75, 1e-15));
    // NB(2, 0.5): (k+1) 2^-(k+2)
    CHECK_THAT(Distribution::negative_binomial(2.0, 0.5).pmf(3), WithinRel(4.0 / 32.0, 1e-13));
    CHECK(Distribution::poisson(1.0).pmf(-1) == 0.0);
    CHECK(Distribution::binomial(10, 0.3).pmf(11) == 0.0);
}

TEST_CASE("cdf and survival are complementary and monotone") {
    for (const auto& d : family()) {
        INFO(d.name());
        double prev = 0.0;
        for (std::int64_t n = d.support_min() - 2; n < d.support_min() + 80; ++n) {
            const double c = d.cdf(n);
            CHECK_THAT(c + d.survival(n), WithinAbs(1.0, 1e-13));
            CHECK(c >= prev - 1e-15);
            CHECK_THAT(c - (n > d.support_min() - 2 ? d.cdf(n - 1) : c - d.pmf(n)),
                       WithinAbs(d.pmf(n), 1e-13));
            prev = c;
        }
    }
}

TEST_CASE("far tails stay accurate") {
    // P(Poisson(1) > 20) frozen from a 40-digit computation
    CHECK_THAT(Distribution::poisson(1.0).survival(20), WithinRel(7.5426250772052785e-21, 1e-10));
    CHECK_THAT(Distribution::geometric(0.5).survival(60), WithinRel(std::pow(0.5, 61), 1e-12));
    CHECK(Distribution::binomial(10, 0.3).survival(10) == 0.0);
}

TEST_CASE("pmf ratio bound dominates actual ratios") {
    for (const auto& d : family()) {
        INFO(d.name());
        for (std::int64_t k = d.support_min(); k < d.support_min() + 60; ++k) {
            const double b = d.pmf_ratio_bound(k);
            if (std::isinf(b))
                continue;
            for (std::int64_t j = k; j < k + 40; ++j)
                if (d.pmf(j) > 0.0)
                    CHECK(d.pmf(j + 1) / d.pmf(j) <= b * (1 + 1e-12));
        }
    }
}

TEST_CASE("survival sum bound dominates E[(X - m)^+]") {
    for (const auto& d : family()) {
        if (d.is_signed())
            continue;
        INFO(d.name());
        for (std::int64_t m = 0; m < 20; ++m) {
            double s = 0.0;
            for (std::int64_t j = m; j < m + 2000; ++j)
                s += d.survival(j);
            CHECK(s <= d.survival_sum_bound(m) * (1 + 1e-10) + 1e-300);
        }
    }
}

TEST_CASE("means") {
    CHECK_THAT(Distribution::negative_binomial(2.0, 0.5).mean(), WithinRel(2.0, 1e-15));
    CHECK_THAT(Distribution::table({0.7, 0.0, 0.3}, -1).mean(), WithinAbs(-0.4, 1e-15));
    CHECK_THAT(Distribution::geometric(0.25).mean(), WithinRel(3.0, 1e-15));
}

TEST_CASE("sampling matches the mean") {
    for (const auto& d : family()) {
        INFO(d.name());
        CounterRng rng = CounterRng::stream(11, 0);
        const int n = 200'000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(d.sample(rng));
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        const double sd = std::sqrt(std::max(0.0, s2 / n - mean * mean));
        CHECK(std::abs(mean - d.mean()) <= 5 * sd / std::sqrt(n) + 1e-12);
    }
}

TEST_CASE("sampling consumes one uniform per draw") {
    CounterRng rng = CounterRng::stream(3, 0);
    const auto d = Distribution::poisson(4.0);
    for (int i = 0; i < 10; ++i)
        d.sample(rng);
    CHECK(rng.counter() == 10);
}

TEST_CASE("table validation and renormalization") {
    CHECK_THROWS_AS(Distribution::table({0.5, 0.4}), InvalidArgument);
    CHECK_THROWS_AS(Distribution::table({1.2, -0.2}), InvalidArgument);
    CHECK_THROWS_AS(Distribution::table({}), InvalidArgument);
    const auto d = Distribution::table({0.5, 0.5 + 5e-10});
    CHECK(d.normalization_adjustment() != 0.0);
    CHECK_THAT(d.cdf(1), WithinAbs(1.0, 1e-15));
    // trimmed zeros move the offset
    const auto t = Distribution::table({0.0, 0.0, 1.0, 0.0});
    CHECK(t.support_min() == 2);
    CHECK(t.support_max() == 2);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Distribution::poisson(-1.0), InvalidArgument);
    CHECK_THROWS_AS(Distribution::geometric(0.0), InvalidArgument);
    CHECK_THROWS_AS(Distribution::bernoulli(1.5), InvalidArgument);
    CHECK_THROWS_AS(Distribution::negative_binomial(0.0, 0.5), InvalidArgument);
}
