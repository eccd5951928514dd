#include "dprob/stopped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dprob/error.hpp"
#include "dprob/parallel.hpp"

namespace dprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kStepDomain = 0x58535445;  // X_n draws
constexpr std::uint64_t kStopDomain = 0x57535450;  // independent w draws
constexpr std::uint64_t kLawDomain = 0x4c415721;   // stopping-law pass

double perturbation(const ModelSpec& s, std::uint64_t n) {
    const double x = static_cast<double>(n);
    switch (s.perturbation) {
    case Perturbation::none:
        return 0.0;
    case Perturbation::half_pow:
        return s.scale * std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(n + 1, 2000)));
    case Perturbation::inv_square:
        return s.scale / ((x + 1) * (x + 1));
    }
    return 0.0;
}

std::uint64_t poisson_draw(double mean, CounterRng& rng) {
    const double u = rng.uniform();
    std::uint64_t k = 0;
    double p = std::exp(-mean);
    double c = p;
    while (u >= c) {
        ++k;
        p *= mean / static_cast<double>(k);
        if (p == 0.0)
            break;
        c += p;
    }
    return k;
}

double prob_at_least(const StoppingRule& w, std::uint64_t n,
                     const StoppingLaw* law) {
    if (auto* ind = std::get_if<IndependentRule>(&w))
        return ind->dist.survival(static_cast<std::int64_t>(n) - 1 - ind->shift);
    return n < law->at_least.size() ? law->at_least[n] : 0.0;
}

// Upper bound on sum_{k>n} P(w >= k).
class ExcessBound {
public:
    ExcessBound(const StoppingRule& w, const StoppingLaw* law) : w_(w) {
        if (law) {
            suffix_.assign(law->at_least.size() + 1, 0.0);
            for (std::size_t k = law->at_least.size(); k-- > 0;)
                suffix_[k] = suffix_[k + 1] + law->at_least[k];
        }
    }

    double operator()(std::uint64_t n) const {
        if (auto* ind = std::get_if<IndependentRule>(&w_))
            return ind->dist.survival_sum_bound(static_cast<std::int64_t>(n) -
                                                ind->shift);
        return n + 1 < suffix_.size() ? suffix_[n + 1] : 0.0;
    }

private:
    const StoppingRule& w_;
    std::vector<double> suffix_;
};

const StoppingLaw* require_law(const StoppingRule& w, const StoppingLaw* law) {
    if (std::holds_alternative<ThresholdRule>(w) && law == nullptr)
        throw InvalidArgument(
            "threshold stopping rule needs an estimated stopping law");
    return std::holds_alternative<ThresholdRule>(w) ? law : nullptr;
}

double mean_of(const std::vector<double>& xs, double* se) {
    NeumaierSum m;
    for (double x : xs)
        m.add(x);
    const double n = static_cast<double>(xs.size());
    const double mean = xs.empty() ? 0.0 : m.value() / n;
    if (se) {
        NeumaierSum v;
        for (double x : xs)
            v.add((x - mean) * (x - mean));
        *se = xs.size() > 1 ? std::sqrt(v.value() / (n - 1) / n) : 0.0;
    }
    return mean;
}

}  // namespace

TriangularModel make_model(const ModelSpec& spec) {
    if (!std::isfinite(spec.limit) || !std::isfinite(spec.scale))
        throw InvalidArgument("model limit and scale must be finite");
    // Perturbations are monotone in n with extremes at n = 1 and n -> inf.
    const double first = spec.limit + perturbation(spec, 1);
    const double lo = std::min(spec.limit, first);
    const double hi = std::max(spec.limit, first);
    if (spec.step == StepLaw::bernoulli && (lo < 0.0 || hi > 1.0))
        throw InvalidArgument("Bernoulli steps need every mean in [0, 1]");
    if (spec.step == StepLaw::poisson && lo < 0.0)
        throw InvalidArgument("Poisson steps need nonnegative means");

    TriangularModel m;
    m.limit_mean = spec.limit;
    m.mean_fn = [spec](std::uint64_t n) {
        return spec.limit + perturbation(spec, n);
    };
    m.mean_sup = std::max(std::abs(lo), std::abs(hi));
    const double s = std::abs(spec.scale);
    switch (spec.perturbation) {
    case Perturbation::none:
        m.deviation_tail = [](std::uint64_t) { return 0.0; };
        break;
    case Perturbation::half_pow:
        m.deviation_tail = [s](std::uint64_t n) {
            return s * std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(n + 1, 2000)));
        };
        break;
    case Perturbation::inv_square:
        // sum_{k>n} (k+1)^-2 <= 1/(n+1)
        m.deviation_tail = [s](std::uint64_t n) {
            return s / static_cast<double>(n + 1);
        };
        break;
    }
    auto mean = m.mean_fn;
    switch (spec.step) {
    case StepLaw::bernoulli:
        m.sampler_fn = [mean](std::uint64_t n, CounterRng& rng) {
            return rng.uniform() < mean(n) ? 1.0 : 0.0;
        };
        break;
    case StepLaw::poisson:
        m.sampler_fn = [mean](std::uint64_t n, CounterRng& rng) {
            return static_cast<double>(poisson_draw(mean(n), rng));
        };
        break;
    case StepLaw::constant:
        m.sampler_fn = [mean](std::uint64_t n, CounterRng&) { return mean(n); };
        break;
    }
    m.description = spec.name.empty() ? "custom model" : spec.name;
    return m;
}

std::vector<std::string> model_names() {
    return {"iid-constant-mean", "geometric-perturbed-bernoulli"};
}

ModelSpec named_model(const std::string& name) {
    if (name == "iid-constant-mean")
        return {2.0, Perturbation::none, 0.0, StepLaw::poisson, name};
    if (name == "geometric-perturbed-bernoulli")
        return {0.5, Perturbation::half_pow, 1.0, StepLaw::bernoulli, name};
    throw InvalidArgument("unknown model '" + name + "'");
}

std::uint64_t rule_cap(const StoppingRule& w) {
    return std::visit([](const auto& r) { return r.cap; }, w);
}

PathOutcome run_stopped_path(const TriangularModel& model,
                             const StoppingRule& w, CounterRng& rng_x,
                             CounterRng& rng_w) {
    PathOutcome out;
    if (auto* ind = std::get_if<IndependentRule>(&w)) {
        const std::int64_t drawn = ind->dist.sample(rng_w) + ind->shift;
        std::uint64_t stop = drawn < 0 ? 0 : static_cast<std::uint64_t>(drawn);
        if (stop > ind->cap) {
            stop = ind->cap;
            out.capped = true;
        }
        NeumaierSum s;
        for (std::uint64_t n = 1; n <= stop; ++n)
            s.add(model.sampler_fn(n, rng_x));
        out.stop = stop;
        out.sum = s.value();
        return out;
    }
    const auto& th = std::get<ThresholdRule>(w);
    double s = 0.0;
    std::uint64_t n = 0;
    while (n < th.cap) {
        ++n;
        s += model.sampler_fn(n, rng_x);
        if (s >= th.level) {
            out.stop = n;
            out.sum = s;
            return out;
        }
    }
    out.stop = n;
    out.sum = s;
    out.capped = true;
    return out;
}

StoppingLaw estimate_stopping_law(const TriangularModel& model,
                                  const ThresholdRule& rule,
                                  std::uint64_t replicates, std::uint64_t seed,
                                  unsigned threads) {
    if (replicates < 1)
        throw InvalidArgument("replicates must be >= 1");
    const StoppingRule w = rule;
    StoppingLaw law;
    law.draws.resize(replicates);
    const std::uint64_t blocks =
        (replicates + kReplicateBlock - 1) / kReplicateBlock;
    std::vector<std::uint64_t> caps(blocks, 0);
    for_each_block(blocks, threads, [&](std::uint64_t b) {
        CounterRng rx = CounterRng::stream(seed, b, kLawDomain);
        CounterRng unused(0);
        const std::uint64_t lo = b * kReplicateBlock;
        const std::uint64_t hi = std::min(replicates, lo + kReplicateBlock);
        for (std::uint64_t r = lo; r < hi; ++r) {
            const PathOutcome o = run_stopped_path(model, w, rx, unused);
            law.draws[r] = o.stop;
            caps[b] += o.capped ? 1 : 0;
        }
    });
    for (auto c : caps)
        law.cap_hits += c;

    const std::uint64_t top =
        *std::max_element(law.draws.begin(), law.draws.end());
    std::vector<std::uint64_t> hist(top + 1, 0);
    for (auto s : law.draws)
        ++hist[s];
    law.at_least.assign(top + 1, 0.0);
    std::uint64_t acc = 0;
    const double n = static_cast<double>(replicates);
    for (std::uint64_t k = top + 1; k-- > 0;) {
        acc += hist[k];
        law.at_least[k] = static_cast<double>(acc) / n;
    }
    return law;
}

SeriesEstimate kp_series(const TriangularModel& model, const StoppingRule& w,
                         const SeriesPolicy& policy, const StoppingLaw* law) {
    law = require_law(w, law);
    const ExcessBound excess(w, law);
    const double sup = model.mean_sup;

    const SeriesResult r = sum_series(
        [&](std::uint64_t i) {
            const std::uint64_t n = i + 1;
            const double p = prob_at_least(w, n, law);
            return p == 0.0 ? 0.0 : p * model.mean_fn(n);
        },
        [&](std::uint64_t i) { return sup * excess(i + 1); }, policy);

    SeriesEstimate out{r.value, 0.0, r.certified && !law, r.terms_used};
    if (law) {
        // Value is the sample mean of g(w) = sum_{n<=w} E[X_n].
        const std::size_t top = law->at_least.size();
        std::vector<double> prefix(top, 0.0);
        NeumaierSum acc;
        for (std::size_t n = 1; n < top; ++n) {
            acc.add(model.mean_fn(n));
            prefix[n] = acc.value();
        }
        std::vector<double> g;
        g.reserve(law->draws.size());
        for (auto s : law->draws)
            g.push_back(prefix[s]);
        mean_of(g, &out.se);
    }
    return out;
}

RearrangedEstimate rearranged_series(const TriangularModel& model, const StoppingRule& w,
                           const SeriesPolicy& policy, const StoppingLaw* law) {
    law = require_law(w, law);
    const ExcessBound excess(w, law);
    const double L = model.limit_mean;
    const double sup = model.mean_sup;

    RearrangedEstimate out;
    SeriesResult first, second;
    try {
        first = sum_series(
            [&](std::uint64_t i) {
                const std::uint64_t n = i + 1;
                const double below = 1.0 - prob_at_least(w, n, law);
                return L - model.mean_fn(n) * below;
            },
            [&](std::uint64_t i) {
                return model.deviation_tail(i + 1) + sup * excess(i + 1);
            },
            policy);
    } catch (const Error& e) {
        throw Error(std::string("first series sum(E[X] - E[X_n] P(w<n)): ") +
                    e.what());
    }
    try {
        second = sum_series(
            [&](std::uint64_t i) { return L - model.mean_fn(i + 1); },
            [&](std::uint64_t i) { return model.deviation_tail(i + 1); },
            policy);
    } catch (const Error& e) {
        throw Error(std::string("second series sum(E[X] - E[X_n]): ") +
                    e.what());
    }
    out.first = first.value;
    out.second = second.value;
    out.value = first.value - second.value;
    out.certified = first.certified && second.certified && !law;
    out.terms_first = first.terms_used;
    out.terms_second = second.terms_used;
    return out;
}

McEstimate mc_stopped_sum(const TriangularModel& model, const StoppingRule& w,
                          std::uint64_t replicates, std::uint64_t seed,
                          unsigned threads) {
    if (replicates < 1)
        throw InvalidArgument("replicates must be >= 1");
    const std::uint64_t blocks =
        (replicates + kReplicateBlock - 1) / kReplicateBlock;
    std::vector<double> sums(replicates);
    std::vector<std::uint64_t> caps(blocks, 0);
    for_each_block(blocks, threads, [&](std::uint64_t b) {
        CounterRng rx = CounterRng::stream(seed, b, kStepDomain);
        CounterRng rw = CounterRng::stream(seed, b, kStopDomain);
        const std::uint64_t lo = b * kReplicateBlock;
        const std::uint64_t hi = std::min(replicates, lo + kReplicateBlock);
        for (std::uint64_t r = lo; r < hi; ++r) {
            const PathOutcome o = run_stopped_path(model, w, rx, rw);
            sums[r] = o.sum;
            caps[b] += o.capped ? 1 : 0;
        }
    });
    McEstimate mc;
    mc.replicates = replicates;
    mc.estimate = mean_of(sums, &mc.se);
    for (auto c : caps)
        mc.cap_hits += c;
    mc.cap_warning =
        static_cast<double>(mc.cap_hits) > 0.01 * static_cast<double>(replicates);
    return mc;
}

StoppedSumReport stopped_report(const TriangularModel& model,
                                const StoppingRule& w,
                                const SeriesPolicy& policy,
                                std::uint64_t replicates, std::uint64_t seed,
                                unsigned threads) {
    StoppedSumReport rep;
    rep.replicates = replicates;

    std::optional<StoppingLaw> law;
    if (auto* th = std::get_if<ThresholdRule>(&w)) {
        law = estimate_stopping_law(model, *th, replicates, seed, threads);
        rep.law_estimated = true;
    }
    const StoppingLaw* lp = law ? &*law : nullptr;

    bool have_kp = false, have_rearranged = false;
    try {
        const SeriesEstimate kp = kp_series(model, w, policy, lp);
        rep.series_kp = kp.value;
        rep.series_kp_se = kp.se;
        rep.terms_kp = kp.terms_used;
        rep.certified = kp.certified;
        have_kp = true;
    } catch (const Error& e) {
        rep.errors.push_back(std::string("kp_series: ") + e.what());
    }
    try {
        const RearrangedEstimate t = rearranged_series(model, w, policy, lp);
        rep.series_rearranged = t.value;
        rep.rearranged_first = t.first;
        rep.rearranged_second = t.second;
        rep.terms_rearranged_first = t.terms_first;
        rep.terms_rearranged_second = t.terms_second;
        rep.certified = rep.certified && t.certified;
        have_rearranged = true;
    } catch (const Error& e) {
        rep.errors.push_back(std::string("rearranged_series: ") + e.what());
    }
    if (!have_kp || !have_rearranged)
        rep.certified = false;

    const McEstimate mc = mc_stopped_sum(model, w, replicates, seed, threads);
    rep.mc_estimate = mc.estimate;
    rep.mc_se = mc.se;
    rep.cap_hits = mc.cap_hits + (law ? law->cap_hits : 0);
    rep.cap_warning = mc.cap_warning;

    if (have_kp && have_rearranged) {
        rep.series_abs_diff = std::abs(rep.series_kp - rep.series_rearranged);
        rep.series_agree = rep.series_abs_diff < 1e-9;
    }
    if (have_kp) {
        const double se = std::hypot(rep.mc_se, rep.series_kp_se);
        const double gap = rep.mc_estimate - rep.series_kp;
        if (se > 0.0) {
            rep.mc_z = gap / se;
            rep.mc_agree = std::abs(gap) <= 3.0 * se;
        } else {
            rep.mc_agree =
                std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(rep.series_kp));
        }
    }
    return rep;
}

SequencePair stopped_sequence_pair(const TriangularModel& model,
                                   const IndependentRule& w) {
    SequencePair sp;
    sp.name = "stopped-demo";
    const Distribution dist = w.dist;
    const std::int64_t shift = w.shift;
    sp.alpha = [dist, shift](std::uint64_t n) {
        return 1.0 - dist.survival(static_cast<std::int64_t>(n) - shift);
    };
    sp.alpha_limit = 1.0;
    sp.alpha_deviation_tail = [dist, shift](std::uint64_t n) {
        return dist.survival_sum_bound(static_cast<std::int64_t>(n) + 1 - shift);
    };
    auto mean = model.mean_fn;
    sp.beta = [mean](std::uint64_t n) { return mean(n + 1); };
    sp.beta_limit = model.limit_mean;
    auto dev = model.deviation_tail;
    sp.beta_deviation_tail = [dev](std::uint64_t n) { return dev(n + 1); };
    sp.beta_sup = model.mean_sup;
    return sp;
}

}  // namespace dprob
