#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dprob/distribution.hpp"
#include "dprob/identities.hpp"
#include "dprob/rng.hpp"
#include "dprob/series.hpp"

namespace dprob {

// A sequence X_1, X_2, ... of independent draws whose means E[X_n] converge
// to limit_mean. Convergence in mean is a caller-asserted hypothesis.
struct TriangularModel {
    std::function<double(std::uint64_t)> mean_fn;  // n >= 1
    std::function<double(std::uint64_t, CounterRng&)> sampler_fn;
    double limit_mean = 0.0;
    std::string description;
    // Certificates for the series routes: sup_n |E[X_n]| and a bound on
    // sum_{k>n} |E[X] - E[X_k]|.
    double mean_sup = 0.0;
    std::function<double(std::uint64_t)> deviation_tail;
};

enum class Perturbation {
    none,         // E[X_n] = limit
    half_pow,     // E[X_n] = limit + scale 2^-(n+1)
    inv_square,   // E[X_n] = limit + scale / (n+1)^2
};

enum class StepLaw {
    bernoulli,  // X_n ~ Bernoulli(E[X_n])
    poisson,    // X_n ~ Poisson(E[X_n])
    constant,   // X_n = E[X_n]
};

// Serializable description of a TriangularModel.
struct ModelSpec {
    double limit = 0.0;
    Perturbation perturbation = Perturbation::none;
    double scale = 0.0;
    StepLaw step = StepLaw::constant;
    std::string name;
};

TriangularModel make_model(const ModelSpec& spec);

// Registry: "iid-constant-mean" (Poisson steps, mean 2) and
// "geometric-perturbed-bernoulli" (Bernoulli steps, mean 1/2 + 2^-(n+1)).
ModelSpec named_model(const std::string& name);
std::vector<std::string> model_names();

// w drawn independently of the X_n: w = shift + D with D ~ dist.
struct IndependentRule {
    Distribution dist;
    std::int64_t shift = 0;
    std::uint64_t cap = 1'000'000;
};

// w = first n with S_n >= level, or cap if that never happens by then.
struct ThresholdRule {
    double level = 0.0;
    std::uint64_t cap = 1'000'000;
};

using StoppingRule = std::variant<IndependentRule, ThresholdRule>;

std::uint64_t rule_cap(const StoppingRule& w);

// Empirical law of w from a dedicated Monte Carlo pass.
struct StoppingLaw {
    std::vector<double> at_least;  // at_least[n] = P(w >= n), n = 0..max
    std::vector<std::uint64_t> draws;  // w per replicate
    std::uint64_t cap_hits = 0;
};

StoppingLaw estimate_stopping_law(const TriangularModel& model,
                                  const ThresholdRule& rule,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  unsigned threads = 0);

struct SeriesEstimate {
    double value = 0.0;
    double se = 0.0;  // nonzero only when P(w >= n) was estimated
    bool certified = false;
    std::uint64_t terms_used = 0;
};

// sum_{n>=1} P(w >= n) E[X_n]. Threshold rules need `law`.
SeriesEstimate kp_series(const TriangularModel& model, const StoppingRule& w,
                         const SeriesPolicy& policy = {},
                         const StoppingLaw* law = nullptr);

struct RearrangedEstimate {
    double value = 0.0;
    double first = 0.0;   // sum (E[X] - E[X_n] P(w < n))
    double second = 0.0;  // sum (E[X] - E[X_n])
    bool certified = false;
    std::uint64_t terms_first = 0;
    std::uint64_t terms_second = 0;
};

// sum (E[X] - E[X_n] P(w < n)) - sum (E[X] - E[X_n]), n >= 1.
RearrangedEstimate rearranged_series(const TriangularModel& model, const StoppingRule& w,
                           const SeriesPolicy& policy = {},
                           const StoppingLaw* law = nullptr);

struct PathOutcome {
    std::uint64_t stop = 0;  // w
    double sum = 0.0;        // S_w
    bool capped = false;
};

// One replicate. rng_w feeds independent rules only.
PathOutcome run_stopped_path(const TriangularModel& model,
                             const StoppingRule& w, CounterRng& rng_x,
                             CounterRng& rng_w);

struct McEstimate {
    double estimate = 0.0;
    double se = 0.0;
    std::uint64_t replicates = 0;
    std::uint64_t cap_hits = 0;
    bool cap_warning = false;  // cap hit rate above 1%
};

McEstimate mc_stopped_sum(const TriangularModel& model, const StoppingRule& w,
                          std::uint64_t replicates, std::uint64_t seed,
                          unsigned threads = 0);

struct StoppedSumReport {
    double series_kp = 0.0;
    double series_kp_se = 0.0;
    double series_rearranged = 0.0;
    double rearranged_first = 0.0;
    double rearranged_second = 0.0;
    double mc_estimate = 0.0;
    double mc_se = 0.0;
    std::uint64_t terms_kp = 0;
    std::uint64_t terms_rearranged_first = 0;
    std::uint64_t terms_rearranged_second = 0;
    std::uint64_t replicates = 0;
    std::uint64_t cap_hits = 0;
    bool cap_warning = false;
    bool certified = false;
    bool law_estimated = false;
    double series_abs_diff = 0.0;  // |kp - rearranged|
    double mc_z = 0.0;             // (mc - kp) / combined SE
    bool series_agree = false;     // |kp - rearranged| < 1e-9
    bool mc_agree = false;         // |mc - kp| <= 3 combined SE
    std::vector<std::string> errors;
};

StoppedSumReport stopped_report(const TriangularModel& model,
                                const StoppingRule& w,
                                const SeriesPolicy& policy,
                                std::uint64_t replicates, std::uint64_t seed,
                                unsigned threads = 0);

// alpha_n = P(w < n+1), beta_n = E[X_{n+1}]: the two-sequence identity
// instance that yields the stopped-sum rearrangement. Independent rules only.
SequencePair stopped_sequence_pair(const TriangularModel& model,
                                   const IndependentRule& w);

}  // namespace dprob
