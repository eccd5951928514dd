#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dprob/distribution.hpp"
#include "dprob/rng.hpp"

namespace dprob {

// Replicate block b of a walk run draws from
// CounterRng::stream(seed, b, kWalkStreamDomain).
inline constexpr std::uint64_t kWalkStreamDomain = 0x57414c4b;

struct WalkConfig {
    Distribution step;  // finite support; signed steps via an offset table
    std::uint32_t horizon = 200;
    std::uint64_t replicates = 100000;
    std::uint64_t seed = 42;
    std::vector<unsigned> orders{1, 2, 3};
    unsigned threads = 0;  // 0 = hardware concurrency
    double gate_threshold = 1e-4;
    unsigned bootstrap_resamples = 200;

    void validate() const;
};

// eta: number of i in [1, n] with S_i > 0.
// first_max: smallest i in [1, n] attaining max S_i, or 0 when that max <= 0.
struct PathStats {
    std::uint32_t eta = 0;
    std::uint32_t first_max = 0;
};

// One walk of `horizon` steps. When positive_at is non-null,
// positive_at[i-1] is incremented for every i with S_i > 0.
PathStats simulate_path(const Distribution& step, std::uint32_t horizon,
                        CounterRng& rng, std::uint64_t* positive_at = nullptr);

struct MnEstimate {
    std::uint32_t n = 0;
    double m = 0.0;  // estimated P(S_n > 0)
    double se = 0.0;
};

struct WeightedSum {
    unsigned order = 0;
    double eta = 0.0;
    double se_eta = 0.0;
    double first_max = 0.0;
    double se_first_max = 0.0;
};

struct WalkStats {
    std::uint32_t horizon = 0;
    std::uint64_t replicates = 0;
    std::vector<std::uint64_t> eta_hist;        // index = value, 0..horizon
    std::vector<std::uint64_t> first_max_hist;  // index = value, 0..horizon
    std::vector<MnEstimate> m_n;                // n = 1..horizon
    double sum_m_over_n = 0.0;                  // sum_n m_n / n up to horizon
    std::vector<WeightedSum> weighted_sums;     // replicate-variance SEs
    std::vector<std::string> notes;
    std::vector<PathStats> samples;  // per replicate, in replicate order
};

// sum_{n>=0} (n+1)...(n+N-1) P(V > n+N-1) for the empirical law in `hist`.
double empirical_weighted_sum(const std::vector<std::uint64_t>& hist,
                              std::uint64_t total, unsigned order);

WalkStats simulate_walk(const WalkConfig& cfg);

struct EquidistributionCheck {
    unsigned order = 0;
    double eta = 0.0;
    double first_max = 0.0;
    double diff = 0.0;  // eta - first_max
    double se_eta = 0.0;
    double se_first_max = 0.0;
    double se_diff = 0.0;      // paired bootstrap SE of the difference
    double combined_se = 0.0;  // sqrt(se_eta^2 + se_first_max^2)
    double ci_low = 0.0;       // percentile interval of the difference
    double ci_high = 0.0;
    bool pass = false;  // |diff| <= 3 combined_se
};

struct EquidistributionReport {
    double gate_value = 0.0;  // m_n at the horizon
    double gate_threshold = 0.0;
    unsigned resamples = 0;
    std::vector<EquidistributionCheck> checks;
    bool pass = false;
};

// Compares the weighted tail sums of eta and first_max per order. Throws
// GateError when P(S_horizon > 0) is not below the gate threshold.
EquidistributionReport check_equidistribution(const WalkConfig& cfg,
                                              const WalkStats& stats);
EquidistributionReport check_equidistribution(const WalkConfig& cfg);

}  // namespace dprob
