#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dprob/rng.hpp"

namespace dprob {

enum class Kind {
    table,  // finite table on {offset, offset+1, ...}; offset may be negative
    bernoulli,
    binomial,
    geometric,  // failures before the first success, support {0, 1, 2, ...}
    poisson,
    negative_binomial,  // failures before the r-th success
};

// An integer-valued random variable. Immutable after construction.
class Distribution {
public:
    // Entries must sum to 1 within `tolerance`; the table is renormalised
    // and the discrepancy kept in normalization_adjustment(). Leading and
    // trailing zeros are trimmed.
    static Distribution table(std::vector<double> pmf, std::int64_t offset = 0,
                              double tolerance = 1e-9);
    static Distribution point_mass(std::int64_t value);
    static Distribution bernoulli(double p);
    static Distribution binomial(std::uint64_t trials, double p);
    static Distribution geometric(double p);
    static Distribution poisson(double lambda);
    static Distribution negative_binomial(double r, double p);

    Kind kind() const { return kind_; }
    std::string name() const;

    double pmf(std::int64_t n) const;
    double cdf(std::int64_t n) const;       // P(X <= n)
    double survival(std::int64_t n) const;  // P(X > n)

    std::int64_t support_min() const;
    std::optional<std::int64_t> support_max() const;
    bool is_signed() const { return support_min() < 0; }

    // sup_{j >= k} pmf(j+1) / pmf(j); 0 once the support is exhausted, +inf
    // where no bound below 1 is available.
    double pmf_ratio_bound(std::int64_t k) const;

    // Upper bound on sum_{j >= m} survival(j), i.e. E[(X - m)^+].
    double survival_sum_bound(std::int64_t m) const;

    double mean() const;

    // Inversion sampling; consumes exactly one uniform per draw.
    std::int64_t sample(CounterRng& rng) const;

    // Parameters.
    double p() const { return p_; }
    double lambda() const { return lambda_; }
    double r() const { return r_; }
    std::uint64_t trials() const { return trials_; }
    std::int64_t offset() const { return offset_; }
    const std::vector<double>& table_pmf() const { return pmf_; }
    double normalization_adjustment() const { return adjustment_; }

private:
    Distribution() = default;

    double pmf_ratio(std::int64_t k) const;  // exact pmf(k+1)/pmf(k)
    double lower_sum(std::int64_t n) const;  // sum_{k<=n} pmf(k), direct
    double upper_sum(std::int64_t n) const;  // sum_{k>n} pmf(k), direct
    bool infinite_support() const;

    Kind kind_ = Kind::table;
    double p_ = 0.0;
    double lambda_ = 0.0;
    double r_ = 0.0;
    std::uint64_t trials_ = 0;
    std::int64_t offset_ = 0;
    std::vector<double> pmf_;
    std::vector<double> cum_;   // cum_[i] = P(X <= offset + i)
    std::vector<double> tail_;  // tail_[i] = P(X > offset + i)
    double adjustment_ = 0.0;
};

}  // namespace dprob
