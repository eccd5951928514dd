#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

namespace dprob {

enum class TailMode {
    certified,  // supplied tail bounds must certify before max_terms
    capped,     // reaching max_terms yields an uncertified result instead of an error
};

struct SeriesPolicy {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    std::uint64_t max_terms = 10'000'000;
    TailMode tail_mode = TailMode::certified;

    // Throws InvalidArgument unless rel_tol > 0, abs_tol >= 0, max_terms >= 1.
    void validate() const;
};

struct SeriesResult {
    double value = 0.0;
    std::uint64_t terms_used = 0;
    // Upper bound on the neglected remainder when certified; a heuristic
    // magnitude (sum of the trailing small terms) otherwise.
    double tail_estimate = 0.0;
    bool certified = false;
    bool hit_cap = false;
};

// term(n) for n = 0, 1, 2, ...
using TermFn = std::function<double(std::uint64_t)>;
// tail(n) >= |sum_{k>n} term(k)|; may return +inf while no bound is known yet.
using TailBoundFn = std::function<double(std::uint64_t)>;

// Compensated (Neumaier) accumulator.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// prod_{j=1}^{order} (n + j); 1 for order == 0. Throws OverflowError.
double rising_factorial(std::uint64_t n, std::uint64_t order);

// x (x-1) ... (x-order+1) at real x; 1 for order == 0.
double falling_factorial(double x, std::uint64_t order);

// Sums term(0) + term(1) + ... under the policy's stopping rule.
//
// With a tail bound, stops at the first n where tail(n) <= max(abs_tol,
// rel_tol * |partial|) and reports certified = true. Without one, stops once
// 20 consecutive terms are below that threshold (certified = false). Hitting
// max_terms with a tail bound in certified mode throws SeriesCapError.
SeriesResult sum_series(const TermFn& term, const TailBoundFn& tail_bound,
                        const SeriesPolicy& policy);

// Sup over k >= n of coeff(k+1) / coeff(k); +inf when unknown.
using RatioBoundFn = std::function<double(std::uint64_t)>;

// lim_{z -> 1-} d^N/dz^N sum_n coeffs(n) z^n, realised as the Abel sum
// sum_n coeffs(n) n (n-1) ... (n-N+1). Finite support (support_bound) is
// summed exactly; infinite support is certified when coeff_ratio is given.
// Throws DivergenceError when the partial sums never settle.
SeriesResult derivative_at_one(const TermFn& coeffs,
                               std::optional<std::uint64_t> support_bound,
                               std::uint64_t order, const SeriesPolicy& policy,
                               const RatioBoundFn& coeff_ratio = {});

// Remainder bound for a series whose term ratios beyond n are at most rho:
// sum_{k>n} t_k <= t_n * rho / (1 - rho). +inf for rho >= 1.
double geometric_remainder(double t_n, double rho);

}  // namespace dprob
