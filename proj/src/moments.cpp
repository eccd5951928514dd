#include "dprob/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dprob/error.hpp"

namespace dprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_order(unsigned order) {
    if (order < 1)
        throw InvalidArgument("factorial moment order must be >= 1");
}

MomentValue from(const SeriesResult& r) {
    return {r.value, r.certified, r.terms_used};
}

}  // namespace

double relative_difference(double a, double b) {
    if (a == b)
        return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

MomentValue factorial_moment_direct(const Distribution& d, unsigned order,
                                    const SeriesPolicy& policy) {
    require_order(order);
    const std::int64_t base = std::min<std::int64_t>(0, d.support_min());
    const double N = order;

    double last = 0.0;
    auto term = [&](std::uint64_t i) {
        const std::int64_t n = base + static_cast<std::int64_t>(i);
        const double p = d.pmf(n);
        last = p == 0.0 ? 0.0
                        : falling_factorial(static_cast<double>(n), order) * p;
        return last;
    };
    auto tail = [&](std::uint64_t i) {
        const std::int64_t n = base + static_cast<std::int64_t>(i);
        const double rho = d.pmf_ratio_bound(n);
        if (rho == 0.0)
            return 0.0;
        if (n < static_cast<std::int64_t>(order))
            return kInf;
        const double x = static_cast<double>(n);
        return geometric_remainder(last, (x + 1) / (x + 1 - N) * rho);
    };
    return from(sum_series(term, tail, policy));
}

MomentValue factorial_moment_tailsum(const Distribution& d, unsigned order,
                                     const SeriesPolicy& policy) {
    require_order(order);
    const std::int64_t lag = static_cast<std::int64_t>(order) - 1;
    const double N = order;

    double last = 0.0;
    auto upper_term = [&](std::uint64_t n) {
        const double s = d.survival(static_cast<std::int64_t>(n) + lag);
        last = s == 0.0 ? 0.0 : rising_factorial(n, order - 1) * s;
        return last;
    };
    auto upper_tail = [&](std::uint64_t n) {
        const std::int64_t k = static_cast<std::int64_t>(n) + lag + 1;
        const double rho = d.pmf_ratio_bound(k);
        if (rho == 0.0)
            return 0.0;
        const double x = static_cast<double>(n);
        return geometric_remainder(last, (x + N) / (x + 1) * rho);
    };
    SeriesResult upper = sum_series(upper_term, upper_tail, policy);

    MomentValue out{N * upper.value, upper.certified, upper.terms_used};
    if (!d.is_signed())
        return out;

    const std::int64_t lo = d.support_min();
    auto lower_term = [&](std::uint64_t n) {
        const double c = d.cdf(-static_cast<std::int64_t>(n) - 1);
        return c == 0.0 ? 0.0 : rising_factorial(n, order - 1) * c;
    };
    auto lower_tail = [lo](std::uint64_t n) {
        return static_cast<std::int64_t>(n) + 1 >= -lo ? 0.0 : kInf;
    };
    SeriesResult lower = sum_series(lower_term, lower_tail, policy);
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    out.value = N * (upper.value + sign * lower.value);
    out.certified = upper.certified && lower.certified;
    out.terms_used += lower.terms_used;
    return out;
}

MomentValue factorial_moment_pgf(const Distribution& d, unsigned order,
                                 const SeriesPolicy& policy) {
    require_order(order);
    if (d.is_signed())
        throw UnsupportedRoute(
            "PGF route requires nonnegative support; " + d.name() +
            " has mass below zero");
    std::optional<std::uint64_t> bound;
    if (auto hi = d.support_max())
        bound = static_cast<std::uint64_t>(*hi);
    auto coeffs = [&](std::uint64_t n) {
        return d.pmf(static_cast<std::int64_t>(n));
    };
    auto ratio = [&](std::uint64_t n) {
        return d.pmf_ratio_bound(static_cast<std::int64_t>(n));
    };
    return from(derivative_at_one(coeffs, bound, order, policy, ratio));
}

MomentReport moment_report(const Distribution& d, unsigned order,
                           const SeriesPolicy& policy) {
    require_order(order);
    MomentReport rep;
    rep.order = order;
    bool certified = true;

    auto run = [&](auto&& fn, std::optional<double>& slot,
                   std::optional<std::string>& err) {
        try {
            const MomentValue v = fn(d, order, policy);
            slot = v.value;
            certified = certified && v.certified;
        } catch (const Error& e) {
            err = e.what();
            certified = false;
        }
    };
    run(factorial_moment_direct, rep.direct, rep.direct_error);
    run(factorial_moment_tailsum, rep.tail_sum, rep.tail_sum_error);
    if (!d.is_signed())
        run(factorial_moment_pgf, rep.pgf, rep.pgf_error);
    else
        rep.pgf_error = "not applicable: support extends below zero";

    std::vector<double> vals;
    for (const auto& v : {rep.direct, rep.tail_sum, rep.pgf})
        if (v)
            vals.push_back(*v);
    double worst = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            worst = std::max(worst, relative_difference(vals[i], vals[j]));
    rep.max_pairwise_rel_diff = worst;
    rep.certified = certified;
    return rep;
}

}  // namespace dprob
