#include "dprob/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dprob/error.hpp"
#include "dprob/series.hpp"

namespace dprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit_open(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidArgument(std::string(what) + " requires 0 < p < 1");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

Distribution Distribution::table(std::vector<double> pmf, std::int64_t offset,
                                 double tolerance) {
    if (pmf.empty())
        throw InvalidArgument("table pmf must be nonempty");
    NeumaierSum total;
    for (double v : pmf) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InvalidArgument("table entries must lie in [0, 1]");
        total.add(v);
    }
    const double s = total.value();
    if (std::abs(s - 1.0) > tolerance)
        throw InvalidArgument("table pmf sums to " + fmt(s) +
                              ", outside 1 +/- " + fmt(tolerance));

    auto first = std::find_if(pmf.begin(), pmf.end(),
                              [](double v) { return v > 0.0; });
    auto last = std::find_if(pmf.rbegin(), pmf.rend(),
                             [](double v) { return v > 0.0; });
    offset += std::distance(pmf.begin(), first);
    std::vector<double> trimmed(first, last.base());

    Distribution d;
    d.kind_ = Kind::table;
    d.offset_ = offset;
    d.adjustment_ = s - 1.0;
    for (double& v : trimmed)
        v /= s;
    d.pmf_ = std::move(trimmed);

    const std::size_t m = d.pmf_.size();
    d.cum_.resize(m);
    d.tail_.resize(m);
    NeumaierSum up;
    for (std::size_t i = 0; i < m; ++i) {
        up.add(d.pmf_[i]);
        d.cum_[i] = std::min(1.0, up.value());
    }
    NeumaierSum down;
    for (std::size_t i = m; i-- > 0;) {
        d.tail_[i] = std::min(1.0, down.value());
        down.add(d.pmf_[i]);
    }
    d.cum_[m - 1] = 1.0;
    return d;
}

Distribution Distribution::point_mass(std::int64_t value) {
    return table({1.0}, value);
}

Distribution Distribution::bernoulli(double p) {
    require_unit_open(p, "Bernoulli");
    Distribution d;
    d.kind_ = Kind::bernoulli;
    d.p_ = p;
    return d;
}

Distribution Distribution::binomial(std::uint64_t trials, double p) {
    require_unit_open(p, "Binomial");
    Distribution d;
    d.kind_ = Kind::binomial;
    d.trials_ = trials;
    d.p_ = p;
    return d;
}

Distribution Distribution::geometric(double p) {
    require_unit_open(p, "Geometric");
    Distribution d;
    d.kind_ = Kind::geometric;
    d.p_ = p;
    return d;
}

Distribution Distribution::poisson(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("Poisson requires lambda > 0");
    Distribution d;
    d.kind_ = Kind::poisson;
    d.lambda_ = lambda;
    return d;
}

Distribution Distribution::negative_binomial(double r, double p) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidArgument("NegativeBinomial requires r > 0");
    require_unit_open(p, "NegativeBinomial");
    Distribution d;
    d.kind_ = Kind::negative_binomial;
    d.r_ = r;
    d.p_ = p;
    return d;
}

std::string Distribution::name() const {
    switch (kind_) {
    case Kind::table:
        return "Table(offset=" + std::to_string(offset_) +
               ", size=" + std::to_string(pmf_.size()) + ")";
    case Kind::bernoulli:
        return "Bernoulli(" + fmt(p_) + ")";
    case Kind::binomial:
        return "Binomial(" + std::to_string(trials_) + "," + fmt(p_) + ")";
    case Kind::geometric:
        return "Geometric(" + fmt(p_) + ")";
    case Kind::poisson:
        return "Poisson(" + fmt(lambda_) + ")";
    case Kind::negative_binomial:
        return "NegativeBinomial(" + fmt(r_) + "," + fmt(p_) + ")";
    }
    return "?";
}

bool Distribution::infinite_support() const {
    return kind_ == Kind::geometric || kind_ == Kind::poisson ||
           kind_ == Kind::negative_binomial;
}

std::int64_t Distribution::support_min() const {
    return kind_ == Kind::table ? offset_ : 0;
}

std::optional<std::int64_t> Distribution::support_max() const {
    switch (kind_) {
    case Kind::table:
        return offset_ + static_cast<std::int64_t>(pmf_.size()) - 1;
    case Kind::bernoulli:
        return 1;
    case Kind::binomial:
        return static_cast<std::int64_t>(trials_);
    default:
        return std::nullopt;
    }
}

double Distribution::pmf(std::int64_t n) const {
    if (n < support_min())
        return 0.0;
    if (auto hi = support_max(); hi && n > *hi)
        return 0.0;
    const double k = static_cast<double>(n);
    switch (kind_) {
    case Kind::table:
        return pmf_[static_cast<std::size_t>(n - offset_)];
    case Kind::bernoulli:
        return n == 0 ? 1.0 - p_ : p_;
    case Kind::binomial: {
        const double t = static_cast<double>(trials_);
        return std::exp(std::lgamma(t + 1) - std::lgamma(k + 1) -
                        std::lgamma(t - k + 1) + k * std::log(p_) +
                        (t - k) * std::log1p(-p_));
    }
    case Kind::geometric:
        return p_ * std::exp(k * std::log1p(-p_));
    case Kind::poisson:
        return std::exp(k * std::log(lambda_) - lambda_ - std::lgamma(k + 1));
    case Kind::negative_binomial:
        return std::exp(std::lgamma(k + r_) - std::lgamma(r_) -
                        std::lgamma(k + 1) + r_ * std::log(p_) +
                        k * std::log1p(-p_));
    }
    return 0.0;
}

double Distribution::pmf_ratio(std::int64_t k) const {
    const double x = static_cast<double>(k);
    switch (kind_) {
    case Kind::poisson:
        return lambda_ / (x + 1);
    case Kind::geometric:
        return 1.0 - p_;
    case Kind::negative_binomial:
        return (x + r_) * (1.0 - p_) / (x + 1);
    case Kind::binomial:
        return (static_cast<double>(trials_) - x) / (x + 1) * p_ / (1.0 - p_);
    default:
        return pmf(k) > 0.0 ? pmf(k + 1) / pmf(k) : kInf;
    }
}

double Distribution::pmf_ratio_bound(std::int64_t k) const {
    if (auto hi = support_max(); hi && k >= *hi)
        return 0.0;
    if (!infinite_support() || k < 0)
        return kInf;
    switch (kind_) {
    case Kind::poisson:
        return lambda_ / (static_cast<double>(k) + 1);
    case Kind::geometric:
        return 1.0 - p_;
    case Kind::negative_binomial:
        // (j+r)q/(j+1) decreases in j when r >= 1 and increases to q otherwise.
        return r_ >= 1.0 ? pmf_ratio(k) : 1.0 - p_;
    default:
        return kInf;
    }
}

double Distribution::lower_sum(std::int64_t n) const {
    NeumaierSum acc;
    for (std::int64_t k = support_min(); k <= n; ++k)
        acc.add(pmf(k));
    return std::min(1.0, acc.value());
}

double Distribution::upper_sum(std::int64_t n) const {
    NeumaierSum acc;
    std::int64_t k = std::max(n + 1, support_min());
    if (auto hi = support_max()) {
        for (; k <= *hi; ++k)
            acc.add(pmf(k));
        return std::min(1.0, acc.value());
    }
    // Infinite support: sum the upper tail until the ratio-certified
    // remainder is negligible.
    for (;;) {
        const double t = pmf(k);
        acc.add(t);
        if (t == 0.0)
            break;
        const double rem = geometric_remainder(t, pmf_ratio_bound(k));
        if (rem <= 1e-17 * acc.value())
            break;
        ++k;
    }
    return std::min(1.0, acc.value());
}

double Distribution::cdf(std::int64_t n) const {
    if (n < support_min())
        return 0.0;
    if (auto hi = support_max(); hi && n >= *hi)
        return 1.0;
    const double x = static_cast<double>(n);
    switch (kind_) {
    case Kind::table:
        return cum_[static_cast<std::size_t>(n - offset_)];
    case Kind::bernoulli:
        return 1.0 - p_;
    case Kind::geometric:
        return -std::expm1((x + 1) * std::log1p(-p_));
    case Kind::binomial:
        return lower_sum(n);
    case Kind::poisson:
    case Kind::negative_binomial:
        return (x + 1 >= mean()) ? 1.0 - upper_sum(n) : lower_sum(n);
    }
    return 0.0;
}

double Distribution::survival(std::int64_t n) const {
    if (n < support_min())
        return 1.0;
    if (auto hi = support_max(); hi && n >= *hi)
        return 0.0;
    const double x = static_cast<double>(n);
    switch (kind_) {
    case Kind::table:
        return tail_[static_cast<std::size_t>(n - offset_)];
    case Kind::bernoulli:
        return p_;
    case Kind::geometric:
        return std::exp((x + 1) * std::log1p(-p_));
    case Kind::binomial:
        return upper_sum(n);
    case Kind::poisson:
    case Kind::negative_binomial:
        return (x + 1 >= mean()) ? upper_sum(n) : 1.0 - lower_sum(n);
    }
    return 0.0;
}

double Distribution::survival_sum_bound(std::int64_t m) const {
    NeumaierSum acc;
    const std::int64_t lo = support_min();
    if (m < lo) {
        acc.add(static_cast<double>(lo - m));
        m = lo;
    }
    if (auto hi = support_max()) {
        for (std::int64_t j = m; j < *hi; ++j)
            acc.add(survival(j));
        return acc.value();
    }
    std::int64_t j = m;
    while (pmf_ratio_bound(j + 1) >= 1.0) {
        acc.add(survival(j));
        ++j;
    }
    acc.add(survival(j) / (1.0 - pmf_ratio_bound(j + 1)));
    return acc.value();
}

double Distribution::mean() const {
    switch (kind_) {
    case Kind::table: {
        NeumaierSum acc;
        for (std::size_t i = 0; i < pmf_.size(); ++i)
            acc.add(static_cast<double>(offset_ + static_cast<std::int64_t>(i)) *
                    pmf_[i]);
        return acc.value();
    }
    case Kind::bernoulli:
        return p_;
    case Kind::binomial:
        return static_cast<double>(trials_) * p_;
    case Kind::geometric:
        return (1.0 - p_) / p_;
    case Kind::poisson:
        return lambda_;
    case Kind::negative_binomial:
        return r_ * (1.0 - p_) / p_;
    }
    return 0.0;
}

std::int64_t Distribution::sample(CounterRng& rng) const {
    const double u = rng.uniform();
    switch (kind_) {
    case Kind::table: {
        auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        if (it == cum_.end())
            --it;
        return offset_ + std::distance(cum_.begin(), it);
    }
    case Kind::bernoulli:
        return u < 1.0 - p_ ? 0 : 1;
    case Kind::geometric:
        return static_cast<std::int64_t>(
            std::floor(std::log1p(-u) / std::log1p(-p_)));
    default:
        break;
    }

    // Sequential inversion starting from the floor of the mean.
    std::int64_t k = static_cast<std::int64_t>(std::floor(mean()));
    if (auto hi = support_max())
        k = std::min(k, *hi);
    double c = cdf(k);
    if (u < c) {
        while (k > 0) {
            const double below = c - pmf(k);
            if (u >= below)
                break;
            c = below;
            --k;
        }
        return k;
    }
    while (u >= c) {
        if (auto hi = support_max(); hi && k >= *hi)
            return k;
        ++k;
        const double t = pmf(k);
        if (t == 0.0)
            return k;
        c += t;
    }
    return k;
}

}  // namespace dprob
