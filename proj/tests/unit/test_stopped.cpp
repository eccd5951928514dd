#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dprob/error.hpp"
#include "dprob/stopped.hpp"

using namespace dprob;
using Catch::Matchers::WithinAbs;

namespace {

IndependentRule geometric_rule(double p) { return {Distribution::geometric(p), 1}; }

}  // namespace

TEST_CASE("Wald instance: E[S_w] = E[X] E[w] = 6") {
    const auto model = make_model(named_model("iid-constant-mean"));
    const StoppingRule w = geometric_rule(1.0 / 3.0);
    const auto kp = kp_series(model, w);
    CHECK_THAT(kp.value, WithinAbs(6.0, 1e-9));
    CHECK(kp.certified);
    const auto re = rearranged_series(model, w);
    CHECK_THAT(re.value, WithinAbs(6.0, 1e-9));
    CHECK(re.second == 0.0);
}

TEST_CASE("perturbed instance: 1 + 1/3") {
    const auto model = make_model(named_model("geometric-perturbed-bernoulli"));
    const StoppingRule w = geometric_rule(0.5);
    CHECK_THAT(kp_series(model, w).value, WithinAbs(4.0 / 3.0, 1e-10));
    const auto re = rearranged_series(model, w);
    CHECK_THAT(re.value, WithinAbs(4.0 / 3.0, 1e-10));
    // sum (1/2 - 1/2 - 2^-(n+1)) = -1/2
    CHECK_THAT(re.second, WithinAbs(-0.5, 1e-12));
}

TEST_CASE("w = 1 gives E[X_1]") {
    const auto model = make_model(named_model("geometric-perturbed-bernoulli"));
    const StoppingRule w = IndependentRule{Distribution::point_mass(0), 1};
    const auto r = stopped_report(model, w, {}, 20'000, 3, 0);
    CHECK_THAT(r.series_kp, WithinAbs(0.75, 1e-12));
    CHECK_THAT(r.series_rearranged, WithinAbs(0.75, 1e-12));
    CHECK(r.series_agree);
    CHECK(r.mc_agree);
}

TEST_CASE("inverse-square perturbation converges too slowly to certify") {
    // deviations decay like n^-2, so remainders decay like 1/n
    ModelSpec spec{1.0, Perturbation::inv_square, 2.0, StepLaw::poisson, "inv-sq"};
    const auto model = make_model(spec);
    const StoppingRule w = geometric_rule(0.25);
    SeriesPolicy p;
    p.max_terms = 100'000;
    const auto strict = stopped_report(model, w, p, 10'000, 5, 0);
    CHECK_FALSE(strict.errors.empty());
    CHECK_FALSE(strict.certified);

    p.max_terms = 1'000'000;
    p.tail_mode = TailMode::capped;
    const auto capped = stopped_report(model, w, p, 100'000, 5, 0);
    CHECK(capped.errors.empty());
    CHECK_FALSE(capped.certified);
    CHECK(capped.series_abs_diff < 1e-5);
    CHECK(capped.mc_agree);
}

TEST_CASE("threshold rule is reported uncertified") {
    const auto model = make_model(named_model("iid-constant-mean"));
    const StoppingRule w = ThresholdRule{5.0};
    const auto r = stopped_report(model, w, {}, 50'000, 9, 0);
    CHECK_FALSE(r.certified);
    CHECK(r.law_estimated);
    CHECK(r.series_kp_se > 0.0);
    CHECK(r.mc_agree);
}

TEST_CASE("Monte Carlo is reproducible and thread-count independent") {
    const auto model = make_model(named_model("iid-constant-mean"));
    const StoppingRule w = geometric_rule(1.0 / 3.0);
    const auto a = mc_stopped_sum(model, w, 30'000, 1, 1);
    const auto b = mc_stopped_sum(model, w, 30'000, 1, 4);
    CHECK(a.estimate == b.estimate);
    CHECK(a.se == b.se);
}

TEST_CASE("stopping rule cap is counted") {
    const auto model = make_model(named_model("iid-constant-mean"));
    const StoppingRule w = ThresholdRule{1e9, 10};
    const auto mc = mc_stopped_sum(model, w, 1000, 1, 0);
    CHECK(mc.cap_hits == 1000);
    CHECK(mc.cap_warning);
}

TEST_CASE("model registry and validation") {
    for (const auto& name : model_names())
        CHECK_NOTHROW(make_model(named_model(name)));
    CHECK_THROWS_AS(named_model("missing"), InvalidArgument);
    // Bernoulli means must stay within [0, 1]
    ModelSpec bad{0.9, Perturbation::half_pow, 1.0, StepLaw::bernoulli, "bad"};
    CHECK_THROWS_AS(make_model(bad), InvalidArgument);
}

TEST_CASE("stopped sequence pair reproduces the stopped sum") {
    const auto model = make_model(named_model("geometric-perturbed-bernoulli"));
    const auto sp = stopped_sequence_pair(model, geometric_rule(0.5));
    CHECK_THAT(sp.alpha(0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(sp.beta(0), WithinAbs(0.75, 1e-15));
    CHECK(sp.alpha_limit == 1.0);
    CHECK(sp.beta_limit == 0.5);
}
