#include "dprob/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "dprob/bounds.hpp"
#include "dprob/error.hpp"
#include "dprob/identities.hpp"
#include "dprob/moments.hpp"
#include "dprob/stopped.hpp"
#include "dprob/walks.hpp"

namespace dprob {

namespace {

constexpr std::uint64_t kTableDomain = 0x5441424c;  // "TABL"
constexpr std::uint64_t kPairDomain = 0x50414952;   // "PAIR"

// Closed-form (or brute-force, for tables) N-th factorial moment.
double moment_oracle(const Distribution& d, unsigned N) {
    const double q = 1.0 - d.p();
    switch (d.kind()) {
    case Kind::bernoulli:
        return N == 1 ? d.p() : 0.0;
    case Kind::binomial: {
        double f = 1.0;
        for (unsigned j = 0; j < N; ++j)
            f *= static_cast<double>(d.trials()) - j;
        return f * std::pow(d.p(), N);
    }
    case Kind::geometric:
        return std::tgamma(N + 1.0) * std::pow(q / d.p(), N);
    case Kind::poisson:
        return std::pow(d.lambda(), N);
    case Kind::negative_binomial: {
        double f = 1.0;
        for (unsigned j = 0; j < N; ++j)
            f *= d.r() + j;
        return f * std::pow(q / d.p(), N);
    }
    case Kind::table: {
        double s = 0.0;
        const auto& pmf = d.table_pmf();
        for (std::size_t i = 0; i < pmf.size(); ++i) {
            const double x = static_cast<double>(d.offset()) + static_cast<double>(i);
            double f = 1.0;
            for (unsigned j = 0; j < N; ++j)
                f *= x - j;
            s += f * pmf[i];
        }
        return s;
    }
    }
    return 0.0;
}

double oracle_rel_diff(double value, double oracle) {
    if (oracle == 0.0)
        return std::abs(value);
    return std::abs(value - oracle) / std::abs(oracle);
}

// P(X >= k) = 1 - sum_{j<k} pmf(j) for nonnegative X.
double brute_upper_tail(const Distribution& d, std::int64_t k) {
    double below = 0.0;
    for (std::int64_t j = 0; j < k; ++j)
        below += d.pmf(j);
    return std::max(0.0, 1.0 - below);
}

// P(X <= Y) and P(X = Y) by enumeration of the finite product space.
std::pair<double, double> brute_leq(const Distribution& x, const Distribution& y) {
    double leq = 0.0, eq = 0.0;
    for (std::int64_t a = 0; a <= *x.support_max(); ++a)
        for (std::int64_t b = 0; b <= *y.support_max(); ++b) {
            const double p = x.pmf(a) * y.pmf(b);
            if (a <= b)
                leq += p;
            if (a == b)
                eq += p;
        }
    return {leq, eq};
}

Distribution stopping_geometric(double success) {
    return Distribution::geometric(success);
}

}  // namespace

Distribution random_table(CounterRng& rng, int max_size) {
    const auto size = 1 + rng.below(static_cast<std::uint64_t>(max_size));
    std::vector<double> w(size);
    double total = 0.0;
    for (auto& v : w) {
        v = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
        total += v;
    }
    if (total == 0.0) {
        w[0] = 1.0;
        total = 1.0;
    }
    for (auto& v : w)
        v /= total;
    return Distribution::table(std::move(w));
}

std::vector<Distribution> reference_distributions(std::uint64_t seed,
                                                  int random_tables) {
    std::vector<Distribution> out{
        Distribution::bernoulli(0.5),         Distribution::binomial(10, 0.3),
        Distribution::geometric(0.5),         Distribution::poisson(1.0),
        Distribution::poisson(2.0),           Distribution::negative_binomial(2.0, 0.5),
    };
    CounterRng rng = CounterRng::stream(seed, 0, kTableDomain);
    for (int i = 0; i < random_tables; ++i)
        out.push_back(random_table(rng));
    return out;
}

CriterionResult check_factorial_moment_routes(const SelftestOptions& opt) {
    CriterionResult res{1, "factorial moments: direct, tail-sum and PGF routes agree",
                        true, Json::object()};
    double worst_route = 0.0, worst_oracle = 0.0;
    int cases = 0;
    Json failures = Json::array();
    for (const auto& d : reference_distributions(opt.seed)) {
        for (unsigned N = 1; N <= 6; ++N) {
            const MomentReport r = moment_report(d, N);
            ++cases;
            const bool complete = r.direct && r.tail_sum && r.pgf;
            double oracle_gap = 1.0;
            if (complete) {
                const double o = moment_oracle(d, N);
                oracle_gap = std::max({oracle_rel_diff(*r.direct, o),
                                       oracle_rel_diff(*r.tail_sum, o),
                                       oracle_rel_diff(*r.pgf, o)});
            }
            worst_route = std::max(worst_route, r.max_pairwise_rel_diff);
            worst_oracle = std::max(worst_oracle, oracle_gap);
            if (!complete || r.max_pairwise_rel_diff > 1e-8 || oracle_gap > 1e-8) {
                res.pass = false;
                failures.push_back({{"dist", d.name()}, {"N", N}});
            }
        }
    }
    res.details = {{"cases", cases},
                   {"tolerance", 1e-8},
                   {"worst_route_rel_diff", worst_route},
                   {"worst_oracle_rel_diff", worst_oracle},
                   {"failures", failures}};
    return res;
}

CriterionResult check_tail_bound_validity(const SelftestOptions& opt) {
    CriterionResult res{2, "factorial-moment tail bound dominates the true tail",
                        true, Json::object()};
    int cases = 0, violations = 0;
    double worst_check = 0.0;
    double min_slack = 1.0;
    Json failures = Json::array();
    for (const auto& d : reference_distributions(opt.seed)) {
        for (int k = 1; k <= 30; ++k) {
            const double x = 0.5 * k;
            const BoundResult b = tail_bound(d, x);
            const double truth =
                brute_upper_tail(d, static_cast<std::int64_t>(std::ceil(x)));
            ++cases;
            min_slack = std::min(min_slack, b.bound - truth);
            for (const auto& c : b.candidates)
                worst_check = std::max(worst_check, c.check_rel_diff);
            if (!(truth <= b.bound + 1e-10) || b.bound > 1.0) {
                ++violations;
                failures.push_back({{"dist", d.name()}, {"x", x}});
            }
        }
    }

    const BoundResult p = tail_bound(Distribution::poisson(1.0), 5.0);
    const double p_truth = Distribution::poisson(1.0).survival(4);
    const bool anchor = p.best_order == 3 && std::abs(p.bound - 1.0 / 120.0) < 1e-9 &&
                        std::abs(p_truth - 0.0036598468273437) < 1e-12 &&
                        p_truth <= p.bound;
    res.pass = violations == 0 && anchor && worst_check <= 1e-8;
    res.details = {{"cases", cases},
                   {"violations", violations},
                   {"min_slack", min_slack},
                   {"worst_numerator_check_rel_diff", worst_check},
                   {"poisson1_x5", {{"bound", p.bound},
                                    {"best_N", p.best_order},
                                    {"true_tail", p_truth}}},
                   {"failures", failures}};
    return res;
}

CriterionResult check_leq_identity_suite(const SelftestOptions& opt) {
    CriterionResult res{3, "P(X<=n)P(Y=n) identity on random independent pairs",
                        true, Json::object()};
    CounterRng rng = CounterRng::stream(opt.seed, 1, kPairDomain);
    double worst_sides = 0.0, worst_brute = 0.0, worst_symmetry = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Distribution x = random_table(rng);
        const Distribution y = random_table(rng);
        const IdentityReport r = check_leq_identity(x, y);
        const auto [leq, eq] = brute_leq(x, y);
        const auto [geq, eq2] = brute_leq(y, x);
        worst_sides = std::max(worst_sides, r.abs_diff);
        worst_brute = std::max({worst_brute, std::abs(r.lhs - leq),
                                std::abs(r.rhs - leq),
                                std::abs(*r.interpretation - leq)});
        worst_symmetry = std::max(worst_symmetry, std::abs(leq + geq - eq - 1.0));
        (void)eq2;
    }
    res.pass = worst_sides < 1e-10 && worst_brute < 1e-10 && worst_symmetry < 1e-10;
    res.details = {{"pairs", 50},
                   {"tolerance", 1e-10},
                   {"worst_abs_diff", worst_sides},
                   {"worst_vs_brute_force", worst_brute},
                   {"worst_symmetry_defect", worst_symmetry}};
    return res;
}

CriterionResult check_abel_identity_suite(const SelftestOptions& opt) {
    CriterionResult res{4, "PGF equals (1-z) times the CDF generating series",
                        true, Json::object()};
    const double zs[] = {0.0, 0.25, 0.5, 0.75, 0.99};
    CounterRng rng = CounterRng::stream(opt.seed, 2, kPairDomain);
    double worst_tables = 0.0;
    int cases = 0;
    for (int i = 0; i < 20; ++i) {
        const Distribution d = random_table(rng);
        for (double z : zs) {
            worst_tables = std::max(worst_tables, check_abel_identity(d, z).abs_diff);
            ++cases;
        }
    }
    double worst_poisson = 0.0;
    const Distribution pois = Distribution::poisson(1.0);
    for (double z : zs) {
        const IdentityReport r = check_abel_identity(pois, z);
        const double closed = std::exp(z - 1.0);
        worst_poisson = std::max({worst_poisson, std::abs(r.lhs - closed),
                                  std::abs(r.rhs - closed)});
    }
    res.pass = worst_tables < 1e-10 && worst_poisson < 1e-10;
    res.details = {{"table_cases", cases},
                   {"tolerance", 1e-10},
                   {"worst_table_abs_diff", worst_tables},
                   {"worst_poisson_vs_closed_form", worst_poisson}};
    return res;
}

CriterionResult check_two_sequence_suite(const SelftestOptions&) {
    CriterionResult res{5, "two-sequence summation identity on shipped pairs",
                        true, Json::object()};
    struct Case {
        SequencePair pair;
        double expected_lhs;
    };
    const TriangularModel wald = make_model(named_model("iid-constant-mean"));
    const TriangularModel pert =
        make_model(named_model("geometric-perturbed-bernoulli"));
    std::vector<Case> cases{
        {named_sequence_pair("geometric-demo"), -7.0 / 3.0},
        {named_sequence_pair("constant-beta"), -2.0},
        {stopped_sequence_pair(pert, {stopping_geometric(0.5), 1}), -4.0 / 3.0},
        {stopped_sequence_pair(wald, {stopping_geometric(1.0 / 3.0), 1}), -6.0},
    };
    Json rows = Json::array();
    for (const auto& c : cases) {
        const IdentityReport r = check_two_sequence_identity(c.pair);
        const double gap = std::abs(r.lhs - c.expected_lhs);
        const bool ok = r.abs_diff < 1e-9 && gap < 1e-9 && r.certified;
        res.pass = res.pass && ok;
        rows.push_back({{"pair", c.pair.name},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"abs_diff", r.abs_diff},
                        {"closed_form_gap", gap},
                        {"pass", ok}});
    }
    res.details = {{"tolerance", 1e-9}, {"pairs", rows}};
    return res;
}

CriterionResult check_walk_equidistribution(const SelftestOptions& opt) {
    CriterionResult res{6, "positivity count and first argmax have equal weighted tail sums",
                        true, Json::object()};
    WalkConfig cfg{Distribution::table({0.7, 0.0, 0.3}, -1)};
    cfg.horizon = 200;
    cfg.replicates = opt.walk_replicates;
    cfg.seed = opt.seed;
    cfg.orders = {1, 2, 3};
    cfg.threads = opt.threads;
    const EquidistributionReport eq = check_equidistribution(cfg);

    WalkConfig flat = cfg;
    flat.step = Distribution::table({0.5, 0.0, 0.5}, -1);
    flat.replicates = 10'000;
    bool gate_fired = false;
    double flat_gate = 0.0;
    try {
        check_equidistribution(flat);
    } catch (const GateError& e) {
        gate_fired = true;
        flat_gate = e.value();
    }
    res.pass = eq.pass && gate_fired;
    res.details = {{"drift_walk", to_json(eq)},
                   {"zero_drift_gate_fired", gate_fired},
                   {"zero_drift_m_horizon", flat_gate}};
    return res;
}

CriterionResult check_stopped_sums(const SelftestOptions& opt) {
    CriterionResult res{7, "stopped-sum series and Monte Carlo agree", true,
                        Json::object()};
    const TriangularModel wald = make_model(named_model("iid-constant-mean"));
    const StoppingRule wald_rule = IndependentRule{stopping_geometric(1.0 / 3.0), 1};
    const StoppedSumReport a =
        stopped_report(wald, wald_rule, {}, opt.stopped_replicates, opt.seed, opt.threads);
    const bool wald_ok = std::abs(a.series_kp - 6.0) < 1e-9 &&
                         std::abs(a.series_rearranged - 6.0) < 1e-9 && a.mc_agree &&
                         std::abs(a.mc_estimate - 6.0) <= 3.0 * a.mc_se;

    const TriangularModel pert =
        make_model(named_model("geometric-perturbed-bernoulli"));
    const StoppingRule pert_rule = IndependentRule{stopping_geometric(0.5), 1};
    const StoppedSumReport b =
        stopped_report(pert, pert_rule, {}, opt.stopped_replicates, opt.seed, opt.threads);
    const bool pert_ok = std::abs(b.series_kp - 4.0 / 3.0) < 1e-10 &&
                         std::abs(b.series_rearranged - 4.0 / 3.0) < 1e-10 &&
                         b.mc_agree;

    // Decay of |E[X] - E[X_n] P(w < n)| against n^-2 on the perturbed instance.
    double worst_scaled = 0.0;
    const Distribution g = stopping_geometric(0.5);
    for (std::uint64_t n = 1; n <= 50; ++n) {
        const double below = 1.0 - g.survival(static_cast<std::int64_t>(n) - 2);
        const double term = pert.limit_mean - pert.mean_fn(n) * below;
        worst_scaled = std::max(worst_scaled, static_cast<double>(n * n) * std::abs(term));
    }
    const bool decay_ok = worst_scaled <= 1.0;

    res.pass = wald_ok && pert_ok && decay_ok;
    res.details = {{"wald", to_json(a)},
                   {"perturbed", to_json(b)},
                   {"decay_max_n2_term", worst_scaled}};
    return res;
}

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt) {
    return {check_factorial_moment_routes(opt), check_tail_bound_validity(opt),
            check_leq_identity_suite(opt),     check_abel_identity_suite(opt),
            check_two_sequence_suite(opt),     check_walk_equidistribution(opt),
            check_stopped_sums(opt)};
}

Json selftest_json(const SelftestOptions& opt,
                   const std::vector<CriterionResult>& results) {
    Json j;
    j["seed"] = opt.seed;
    j["walk_replicates"] = opt.walk_replicates;
    j["stopped_replicates"] = opt.stopped_replicates;
    Json rows = Json::array();
    bool all = true;
    for (const auto& r : results) {
        rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                        {"details", r.details}});
        all = all && r.pass;
    }
    j["criteria"] = rows;
    j["all_pass"] = all;
    return j;
}

}  // namespace dprob
