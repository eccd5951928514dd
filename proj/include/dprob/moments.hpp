#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dprob/distribution.hpp"
#include "dprob/series.hpp"

namespace dprob {

// A factorial moment value together with the certification status of the
// series that produced it.
struct MomentValue {
    double value = 0.0;
    bool certified = false;
    std::uint64_t terms_used = 0;
};

// E[X (X-1) ... (X-N+1)] summed over the pmf.
MomentValue factorial_moment_direct(const Distribution& d, unsigned order,
                                    const SeriesPolicy& policy = {});

// N * sum_{n>=0} (n+1)...(n+N-1) P(X > n+N-1). For signed support the
// negative half is added as (-1)^N N sum_{n>=0} (n+1)...(n+N-1) P(X <= -n-1),
// which is the same summation by parts applied to the left tail.
MomentValue factorial_moment_tailsum(const Distribution& d, unsigned order,
                                     const SeriesPolicy& policy = {});

// N-th derivative of the PGF at z -> 1-. Throws UnsupportedRoute for signed
// support.
MomentValue factorial_moment_pgf(const Distribution& d, unsigned order,
                                 const SeriesPolicy& policy = {});

struct MomentReport {
    unsigned order = 0;
    std::optional<double> direct;
    std::optional<double> tail_sum;
    std::optional<double> pgf;  // absent for signed support
    double max_pairwise_rel_diff = 0.0;
    bool certified = false;
    // Route name -> failure message, for routes that did not produce a value.
    std::optional<std::string> direct_error;
    std::optional<std::string> tail_sum_error;
    std::optional<std::string> pgf_error;
};

// |a - b| / max(|a|, |b|), and 0 when both are zero.
double relative_difference(double a, double b);

MomentReport moment_report(const Distribution& d, unsigned order,
                           const SeriesPolicy& policy = {});

}  // namespace dprob
