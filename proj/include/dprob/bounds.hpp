#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dprob/distribution.hpp"
#include "dprob/series.hpp"

namespace dprob {

struct BoundCandidate {
    unsigned order = 0;      // N
    double numerator = 0.0;  // (N+1) sum_n (n+1)...(n+N) P(X > n+N)
    double denominator = 0.0;  // x (x-1) ... (x-N)
    double value = 0.0;
    double numerator_direct = 0.0;  // E[X (X-1) ... (X-N)], cross-check
    double check_rel_diff = 0.0;
    bool certified = false;
};

struct SkippedCandidate {
    unsigned order = 0;
    std::string reason;
};

struct BoundResult {
    double x = 0.0;
    unsigned best_order = 0;
    double bound = 1.0;  // min over candidates, clamped to 1
    bool clamped = false;
    bool certified = false;
    std::vector<BoundCandidate> candidates;
    std::vector<SkippedCandidate> skipped;
};

// Relative width within which candidate values count as tied; ties go to
// the smallest order.
inline constexpr double kBoundTieTolerance = 1e-9;

// P(X >= x) <= min over 0 <= N < x of the factorial-moment ratio above.
// Requires x > 0 and nonnegative support. Throws NoFiniteBound if every
// candidate fails.
BoundResult tail_bound(const Distribution& d, double x,
                       const SeriesPolicy& policy = {});

struct ProfileEntry {
    double x = 0.0;
    std::optional<BoundResult> result;
    std::optional<std::string> error;
};

// tail_bound at each x, in input order; failures are recorded per entry.
std::vector<ProfileEntry> bound_profile(const Distribution& d,
                                        const std::vector<double>& xs,
                                        const SeriesPolicy& policy = {});

}  // namespace dprob
