#include "dprob/bounds.hpp"

#include <cmath>
#include <limits>

#include "dprob/error.hpp"
#include "dprob/moments.hpp"

namespace dprob {

BoundResult tail_bound(const Distribution& d, double x,
                       const SeriesPolicy& policy) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidArgument("tail bound requires finite x > 0");
    if (d.is_signed())
        throw UnsupportedRoute("tail bound requires nonnegative support");

    BoundResult res;
    res.x = x;
    res.certified = true;

    // Admissible orders: 0 <= N < x.
    const auto top = static_cast<unsigned>(std::ceil(x) - 1.0);
    for (unsigned N = 0; N <= top; ++N) {
        const double denom = falling_factorial(x, N + 1);
        if (!(denom > 0.0)) {
            // Cannot happen for N < x; kept so a broken invariant is visible.
            res.skipped.push_back({N, "nonpositive denominator"});
            continue;
        }
        try {
            const MomentValue num = factorial_moment_tailsum(d, N + 1, policy);
            const MomentValue chk = factorial_moment_direct(d, N + 1, policy);
            BoundCandidate c;
            c.order = N;
            c.numerator = num.value;
            c.denominator = denom;
            c.value = num.value / denom;
            c.numerator_direct = chk.value;
            c.check_rel_diff = relative_difference(num.value, chk.value);
            c.certified = num.certified;
            if (!std::isfinite(c.value)) {
                res.skipped.push_back({N, "non-finite candidate value"});
                continue;
            }
            res.certified = res.certified && c.certified;
            res.candidates.push_back(c);
        } catch (const Error& e) {
            res.skipped.push_back({N, e.what()});
        }
    }
    if (res.candidates.empty())
        throw NoFiniteBound("no admissible order gives a finite bound at x=" +
                            std::to_string(x));

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : res.candidates)
        best = std::min(best, c.value);
    const double cutoff = best + kBoundTieTolerance * std::abs(best);
    for (const auto& c : res.candidates) {
        if (c.value <= cutoff) {
            res.best_order = c.order;
            best = c.value;
            break;
        }
    }
    res.clamped = best >= 1.0;
    res.bound = std::min(best, 1.0);
    return res;
}

std::vector<ProfileEntry> bound_profile(const Distribution& d,
                                        const std::vector<double>& xs,
                                        const SeriesPolicy& policy) {
    std::vector<ProfileEntry> out;
    out.reserve(xs.size());
    for (double x : xs) {
        ProfileEntry e;
        e.x = x;
        try {
            e.result = tail_bound(d, x, policy);
        } catch (const Error& err) {
            e.error = err.what();
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace dprob
