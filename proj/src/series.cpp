#include "dprob/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dprob/error.hpp"

namespace dprob {

namespace {

constexpr int kSmallRun = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void SeriesPolicy::validate() const {
    if (!(rel_tol > 0.0))
        throw InvalidArgument("rel_tol must be > 0");
    if (!(abs_tol >= 0.0))
        throw InvalidArgument("abs_tol must be >= 0");
    if (max_terms < 1)
        throw InvalidArgument("max_terms must be >= 1");
}

double rising_factorial(std::uint64_t n, std::uint64_t order) {
    double p = 1.0;
    for (std::uint64_t j = 1; j <= order; ++j) {
        p *= static_cast<double>(n) + static_cast<double>(j);
        if (std::isinf(p))
            throw OverflowError(n, order);
    }
    return p;
}

double falling_factorial(double x, std::uint64_t order) {
    double p = 1.0;
    for (std::uint64_t j = 0; j < order; ++j)
        p *= x - static_cast<double>(j);
    return p;
}

double geometric_remainder(double t_n, double rho) {
    if (std::isnan(rho) || rho >= 1.0)
        return kInf;
    if (rho <= 0.0 || t_n == 0.0)
        return 0.0;
    return std::abs(t_n) * rho / (1.0 - rho);
}

SeriesResult sum_series(const TermFn& term, const TailBoundFn& tail_bound,
                        const SeriesPolicy& policy) {
    policy.validate();

    NeumaierSum acc;
    int small_run = 0;
    double run_mag = 0.0;
    double last_tail = kInf;

    for (std::uint64_t n = 0; n < policy.max_terms; ++n) {
        const double t = term(n);
        acc.add(t);
        const double partial = acc.value();
        if (!std::isfinite(partial))
            throw DivergenceError("non-finite partial sum at term " +
                                  std::to_string(n));
        const double threshold =
            std::max(policy.abs_tol, policy.rel_tol * std::abs(partial));

        if (tail_bound) {
            last_tail = tail_bound(n);
            if (last_tail <= threshold)
                return {partial, n + 1, last_tail, true, false};
        } else if (std::abs(t) <= threshold) {
            ++small_run;
            run_mag += std::abs(t);
            if (small_run >= kSmallRun)
                return {partial, n + 1, run_mag, false, false};
        } else {
            small_run = 0;
            run_mag = 0.0;
        }
    }

    const double partial = acc.value();
    if (tail_bound && policy.tail_mode == TailMode::certified)
        throw SeriesCapError(partial, last_tail, policy.max_terms);
    return {partial, policy.max_terms, tail_bound ? last_tail : run_mag, false,
            true};
}

SeriesResult derivative_at_one(const TermFn& coeffs,
                               std::optional<std::uint64_t> support_bound,
                               std::uint64_t order, const SeriesPolicy& policy,
                               const RatioBoundFn& coeff_ratio) {
    if (order == 0)
        throw InvalidArgument("derivative order must be >= 1");

    double last_term = 0.0;
    auto term = [&](std::uint64_t n) {
        const double c = coeffs(n);
        last_term = (c == 0.0)
                        ? 0.0
                        : falling_factorial(static_cast<double>(n), order) * c;
        return last_term;
    };

    TailBoundFn tail;
    if (support_bound) {
        const std::uint64_t bound = *support_bound;
        tail = [bound](std::uint64_t n) { return n >= bound ? 0.0 : kInf; };
    } else if (coeff_ratio) {
        tail = [&, order](std::uint64_t n) {
            const double cr = coeff_ratio(n);
            if (n < order)
                return cr == 0.0 ? 0.0 : kInf;
            const double w = static_cast<double>(n + 1) /
                             static_cast<double>(n + 1 - order);
            return geometric_remainder(last_term, w * cr);
        };
    }

    SeriesResult r = sum_series(term, tail, policy);
    if (r.hit_cap && !tail)
        throw DivergenceError(
            "derivative limit did not settle within max_terms; the "
            "factorial moment may be infinite");
    return r;
}

}  // namespace dprob
