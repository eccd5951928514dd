#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dprob/error.hpp"
#include "dprob/identities.hpp"
#include "dprob/selftest.hpp"

using namespace dprob;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("leq: two fair coins") {
    const auto b = Distribution::bernoulli(0.5);
    const auto r = check_leq_identity(b, b);
    CHECK(r.abs_diff < 1e-12);
    CHECK_THAT(r.lhs, WithinAbs(0.75, 1e-15));
    REQUIRE(r.interpretation);
    CHECK_THAT(*r.interpretation, WithinAbs(0.75, 1e-15));
}

TEST_CASE("leq: Poisson(1) against Poisson(2), frozen") {
    const auto r = check_leq_identity(Distribution::poisson(1.0), Distribution::poisson(2.0));
    CHECK(r.certified);
    CHECK(r.abs_diff < 1e-12);
    CHECK_THAT(r.lhs, WithinAbs(0.8174152250696119, 1e-11));
    CHECK_THAT(*r.interpretation, WithinAbs(0.8174152250696119, 1e-11));
}

TEST_CASE("leq: shifted tables and signed support") {
    const auto x = Distribution::table({0.7, 0.0, 0.3}, 2);
    const auto y = Distribution::table({0.5, 0.5}, 3);
    // P(X <= Y) = 0.7 + 0.3 * 0.5
    const auto r = check_leq_identity(x, y);
    CHECK_THAT(r.lhs, WithinAbs(0.85, 1e-15));
    CHECK_THAT(r.rhs, WithinAbs(0.85, 1e-15));
    CHECK_THROWS_AS(check_leq_identity(Distribution::table({0.5, 0.5}, -1), y), UnsupportedRoute);
}

TEST_CASE("leq: symmetry on random pairs") {
    CounterRng rng = CounterRng::stream(7, 0);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_table(rng);
        const auto y = random_table(rng);
        double eq = 0.0;
        for (std::int64_t k = 0; k < 12; ++k)
            eq += x.pmf(k) * y.pmf(k);
        const double a = check_leq_identity(x, y).lhs;
        const double b = check_leq_identity(y, x).lhs;
        CHECK_THAT(a + b - eq, WithinAbs(1.0, 1e-13));
    }
}

TEST_CASE("abel: z = 0 is exact") {
    const auto d = Distribution::table({0.2, 0.3, 0.5});
    const auto r = check_abel_identity(d, 0.0);
    CHECK(r.lhs == 0.2);
    CHECK(r.rhs == 0.2);
}

TEST_CASE("abel: closed-form PGFs") {
    for (double z : {0.0, 0.3, 0.9, 0.99}) {
        const auto p = check_abel_identity(Distribution::poisson(2.0), z);
        CHECK_THAT(p.lhs, WithinAbs(std::exp(2.0 * (z - 1)), 1e-12));
        CHECK(p.abs_diff < 1e-12);
        const auto g = check_abel_identity(Distribution::geometric(0.3), z);
        CHECK_THAT(g.rhs, WithinAbs(0.3 / (1 - 0.7 * z), 1e-11));
    }
    CHECK_THAT(check_abel_identity(Distribution::geometric(0.3), 0.9).lhs,
               WithinAbs(0.8108108108108109, 1e-12));
}

TEST_CASE("abel: z outside [0, 1)") {
    const auto d = Distribution::poisson(1.0);
    CHECK_THROWS_AS(check_abel_identity(d, 1.0), InvalidArgument);
    CHECK_THROWS_AS(check_abel_identity(d, -0.1), InvalidArgument);
}

TEST_CASE("twoseq: shipped pairs") {
    const auto g = check_two_sequence_identity(named_sequence_pair("geometric-demo"));
    CHECK_THAT(g.lhs, WithinAbs(-7.0 / 3.0, 1e-9));
    CHECK(g.abs_diff < 1e-9);
    CHECK(g.certified);
    const auto c = check_two_sequence_identity(named_sequence_pair("constant-beta"));
    CHECK_THAT(c.lhs, WithinAbs(-2.0, 1e-9));
    CHECK(c.abs_diff < 1e-9);
    CHECK_THROWS_AS(named_sequence_pair("nope"), InvalidArgument);
    CHECK(sequence_pair_names().size() >= 2);
}

TEST_CASE("twoseq: user pair without certificates") {
    SequencePair sp;
    sp.name = "poly";
    sp.alpha = [](std::uint64_t n) { return 1.0 - 1.0 / ((n + 1.0) * (n + 2.0)); };
    sp.beta = [](std::uint64_t n) { return 1.0 + std::pow(0.5, n); };
    sp.alpha_limit = 1.0;
    sp.beta_limit = 1.0;
    // -sum beta_n (1 - alpha_n) = -(1 + sum 2^-n / ((n+1)(n+2)))
    const auto r = check_two_sequence_identity(sp);
    CHECK(r.abs_diff < 1e-6);
}
