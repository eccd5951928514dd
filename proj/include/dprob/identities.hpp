#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dprob/distribution.hpp"
#include "dprob/series.hpp"

namespace dprob {

struct IdentityReport {
    std::string identity;  // "leq", "abel", "twoseq"
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_diff = 0.0;
    bool certified = false;
    // Third, independently computed value where one exists (P(X <= Y) for
    // the leq identity).
    std::optional<double> interpretation;
};

// sum_n P(X<=n) P(Y=n) = 1 - sum_n P(X=n+1) P(Y<=n) for independent X, Y on
// the nonnegative integers.
IdentityReport check_leq_identity(const Distribution& x, const Distribution& y,
                                  const SeriesPolicy& policy = {});

// sum_n P(X=n) z^n = (1-z) sum_n P(X<=n) z^n for 0 <= z < 1.
IdentityReport check_abel_identity(const Distribution& d, double z,
                                   const SeriesPolicy& policy = {});

// Two sequences with limits alpha, beta. The caller asserts that
// sum (alpha - alpha_n), sum (beta - beta_n) and sum (alpha beta -
// alpha_n beta_n) converge and that n (alpha_n - alpha) etc. vanish.
struct SequencePair {
    std::string name;
    std::function<double(std::uint64_t)> alpha;
    std::function<double(std::uint64_t)> beta;
    double alpha_limit = 0.0;
    double beta_limit = 0.0;
    // Optional certificates: bounds on sum_{k>n} |alpha - alpha_k| and
    // sum_{k>n} |beta - beta_k|, plus sup_n |beta_n|.
    std::function<double(std::uint64_t)> alpha_deviation_tail;
    std::function<double(std::uint64_t)> beta_deviation_tail;
    std::optional<double> beta_sup;
};

// -sum beta_n (alpha - alpha_n) = alpha sum (beta - beta_n)
//                                 - sum (alpha beta - alpha_n beta_n).
IdentityReport check_two_sequence_identity(const SequencePair& sp,
                                           const SeriesPolicy& policy = {});

// Built-in pairs: "geometric-demo" (alpha_n = 1 - 2^-(n+1), beta_n = 3 -
// 2^-n) and "constant-beta" (same alpha_n, beta_n = 2).
SequencePair named_sequence_pair(const std::string& name);
std::vector<std::string> sequence_pair_names();

}  // namespace dprob
