#include "dprob/identities.hpp"

#include <cmath>
#include <limits>

#include "dprob/error.hpp"

namespace dprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(const Distribution& d) {
    if (d.is_signed())
        throw UnsupportedRoute(d.name() +
                               ": identity is stated for nonnegative support");
}

void finish(IdentityReport& r) { r.abs_diff = std::abs(r.lhs - r.rhs); }

std::int64_t as_index(std::uint64_t n) { return static_cast<std::int64_t>(n); }

}  // namespace

IdentityReport check_leq_identity(const Distribution& x, const Distribution& y,
                                  const SeriesPolicy& policy) {
    require_nonnegative(x);
    require_nonnegative(y);

    IdentityReport rep;
    rep.identity = "leq";

    const SeriesResult lhs = sum_series(
        [&](std::uint64_t n) { return x.cdf(as_index(n)) * y.pmf(as_index(n)); },
        [&](std::uint64_t n) { return y.survival(as_index(n)); }, policy);
    const SeriesResult rhs = sum_series(
        [&](std::uint64_t n) {
            return x.pmf(as_index(n) + 1) * y.cdf(as_index(n));
        },
        [&](std::uint64_t n) { return x.survival(as_index(n) + 1); }, policy);

    rep.lhs = lhs.value;
    rep.rhs = 1.0 - rhs.value;
    rep.certified = lhs.certified && rhs.certified;

    // P(X <= Y) without going through either side's series.
    const auto xmax = x.support_max();
    const auto ymax = y.support_max();
    if (xmax && ymax) {
        NeumaierSum acc;
        for (std::int64_t a = 0; a <= *xmax; ++a)
            for (std::int64_t b = a; b <= *ymax; ++b)
                acc.add(x.pmf(a) * y.pmf(b));
        rep.interpretation = acc.value();
    } else {
        const SeriesResult p = sum_series(
            [&](std::uint64_t a) {
                return x.pmf(as_index(a)) * y.survival(as_index(a) - 1);
            },
            [&](std::uint64_t a) { return x.survival(as_index(a)); }, policy);
        rep.interpretation = p.value;
        rep.certified = rep.certified && p.certified;
    }
    finish(rep);
    return rep;
}

IdentityReport check_abel_identity(const Distribution& d, double z,
                                   const SeriesPolicy& policy) {
    require_nonnegative(d);
    if (!(z >= 0.0 && z < 1.0))
        throw InvalidArgument("abel identity requires 0 <= z < 1");

    IdentityReport rep;
    rep.identity = "abel";

    const SeriesResult pgf = sum_series(
        [&](std::uint64_t n) {
            return d.pmf(as_index(n)) * std::pow(z, static_cast<double>(n));
        },
        [&](std::uint64_t n) {
            return d.survival(as_index(n)) * std::pow(z, static_cast<double>(n + 1));
        },
        policy);

    auto cdf_term = [&](std::uint64_t n) {
        return d.cdf(as_index(n)) * std::pow(z, static_cast<double>(n));
    };
    double cdf_series = 0.0;
    bool cdf_certified = false;
    if (auto hi = d.support_max()) {
        // Past the support the cdf is identically 1: close the tail as
        // z^{m+1} / (1 - z).
        const auto m = static_cast<std::uint64_t>(*hi);
        const SeriesResult head = sum_series(
            cdf_term, [m](std::uint64_t n) { return n >= m ? 0.0 : kInf; },
            policy);
        cdf_series =
            head.value + std::pow(z, static_cast<double>(m + 1)) / (1.0 - z);
        cdf_certified = head.certified;
    } else {
        const SeriesResult s = sum_series(
            cdf_term,
            [&](std::uint64_t n) {
                return std::pow(z, static_cast<double>(n + 1)) / (1.0 - z);
            },
            policy);
        cdf_series = s.value;
        cdf_certified = s.certified;
    }

    rep.lhs = pgf.value;
    rep.rhs = (1.0 - z) * cdf_series;
    rep.certified = pgf.certified && cdf_certified;
    finish(rep);
    return rep;
}

IdentityReport check_two_sequence_identity(const SequencePair& sp,
                                           const SeriesPolicy& policy) {
    if (!sp.alpha || !sp.beta)
        throw InvalidArgument("sequence pair needs both alpha and beta");
    const double a = sp.alpha_limit;
    const double b = sp.beta_limit;

    const bool have_tails = sp.alpha_deviation_tail && sp.beta_deviation_tail &&
                            sp.beta_sup.has_value();
    TailBoundFn lhs_tail, beta_tail, prod_tail;
    if (have_tails) {
        const double bs = *sp.beta_sup;
        lhs_tail = [&, bs](std::uint64_t n) {
            return bs * sp.alpha_deviation_tail(n);
        };
        beta_tail = [&](std::uint64_t n) { return sp.beta_deviation_tail(n); };
        // alpha beta - a_n b_n = alpha (beta - b_n) + b_n (alpha - a_n)
        prod_tail = [&, bs, a](std::uint64_t n) {
            return std::abs(a) * sp.beta_deviation_tail(n) +
                   bs * sp.alpha_deviation_tail(n);
        };
    }

    const SeriesResult lhs = sum_series(
        [&](std::uint64_t n) { return sp.beta(n) * (a - sp.alpha(n)); },
        lhs_tail, policy);
    const SeriesResult s_beta = sum_series(
        [&](std::uint64_t n) { return b - sp.beta(n); }, beta_tail, policy);
    const SeriesResult s_prod = sum_series(
        [&](std::uint64_t n) { return a * b - sp.alpha(n) * sp.beta(n); },
        prod_tail, policy);

    IdentityReport rep;
    rep.identity = "twoseq";
    rep.lhs = -lhs.value;
    rep.rhs = a * s_beta.value - s_prod.value;
    rep.certified = lhs.certified && s_beta.certified && s_prod.certified;
    finish(rep);
    return rep;
}

std::vector<std::string> sequence_pair_names() {
    return {"geometric-demo", "constant-beta"};
}

SequencePair named_sequence_pair(const std::string& name) {
    auto half_pow = [](std::uint64_t k) {
        return std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(k, 2000)));
    };
    SequencePair sp;
    sp.name = name;
    sp.alpha = [half_pow](std::uint64_t n) { return 1.0 - half_pow(n + 1); };
    sp.alpha_limit = 1.0;
    sp.alpha_deviation_tail = [half_pow](std::uint64_t n) {
        return half_pow(n + 1);
    };
    if (name == "geometric-demo") {
        sp.beta = [half_pow](std::uint64_t n) { return 3.0 - half_pow(n); };
        sp.beta_limit = 3.0;
        sp.beta_deviation_tail = [half_pow](std::uint64_t n) {
            return half_pow(n);
        };
        sp.beta_sup = 3.0;
    } else if (name == "constant-beta") {
        sp.beta = [](std::uint64_t) { return 2.0; };
        sp.beta_limit = 2.0;
        sp.beta_deviation_tail = [](std::uint64_t) { return 0.0; };
        sp.beta_sup = 2.0;
    } else {
        throw InvalidArgument("unknown sequence pair '" + name + "'");
    }
    return sp;
}

}  // namespace dprob
