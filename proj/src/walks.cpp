#include "dprob/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dprob/error.hpp"
#include "dprob/parallel.hpp"
#include "dprob/series.hpp"

namespace dprob {

namespace {

constexpr std::uint64_t kBootstrapDomain = 0x424f4f54;  // "BOOT"

// Inversion table for a finite step law. Draws match Distribution::sample.
class StepTable {
public:
    explicit StepTable(const Distribution& d) {
        const std::int64_t lo = d.support_min();
        const std::int64_t hi = *d.support_max();
        for (std::int64_t k = lo; k <= hi; ++k) {
            values_.push_back(k);
            cum_.push_back(d.cdf(k));
        }
        cum_.back() = 1.0;
    }

    std::int64_t operator()(CounterRng& rng) const {
        const double u = rng.uniform();
        std::size_t i = 0;
        while (i + 1 < cum_.size() && u >= cum_[i])
            ++i;
        return values_[i];
    }

private:
    std::vector<std::int64_t> values_;
    std::vector<double> cum_;
};

template <typename Sampler>
PathStats walk(const Sampler& draw, std::uint32_t horizon, CounterRng& rng,
               std::uint64_t* positive_at) {
    std::int64_t s = 0;
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::uint32_t best_at = 0;
    std::uint32_t eta = 0;
    for (std::uint32_t i = 1; i <= horizon; ++i) {
        s += draw(rng);
        if (s > 0) {
            ++eta;
            if (positive_at)
                ++positive_at[i - 1];
        }
        if (s > best) {
            best = s;
            best_at = i;
        }
    }
    return {eta, best > 0 ? best_at : 0u};
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2)
        return 0.0;
    NeumaierSum m;
    for (double x : xs)
        m.add(x);
    const double mean = m.value() / static_cast<double>(xs.size());
    NeumaierSum v;
    for (double x : xs)
        v.add((x - mean) * (x - mean));
    return std::sqrt(v.value() / static_cast<double>(xs.size() - 1));
}

// Replicate-level SE of the weighted sum, which equals mean of V^(N) / N.
double replicate_se(const std::vector<std::uint64_t>& hist, std::uint64_t total,
                    unsigned order) {
    if (total < 2)
        return 0.0;
    const double n = static_cast<double>(total);
    NeumaierSum m;
    for (std::size_t v = 0; v < hist.size(); ++v)
        m.add(static_cast<double>(hist[v]) *
              falling_factorial(static_cast<double>(v), order) / order);
    const double mean = m.value() / n;
    NeumaierSum ss;
    for (std::size_t v = 0; v < hist.size(); ++v) {
        const double g = falling_factorial(static_cast<double>(v), order) / order;
        ss.add(static_cast<double>(hist[v]) * (g - mean) * (g - mean));
    }
    return std::sqrt(ss.value() / (n - 1) / n);
}

}  // namespace

void WalkConfig::validate() const {
    if (horizon < 1)
        throw InvalidArgument("walk horizon must be >= 1");
    if (replicates < 1)
        throw InvalidArgument("walk replicates must be >= 1");
    if (!step.support_max())
        throw InvalidArgument("walk step distribution must have finite support");
    for (unsigned N : orders)
        if (N < 1)
            throw InvalidArgument("walk orders must be positive");
    if (bootstrap_resamples < 2)
        throw InvalidArgument("bootstrap needs at least 2 resamples");
}

PathStats simulate_path(const Distribution& step, std::uint32_t horizon,
                        CounterRng& rng, std::uint64_t* positive_at) {
    return walk([&](CounterRng& g) { return step.sample(g); }, horizon, rng,
                positive_at);
}

double empirical_weighted_sum(const std::vector<std::uint64_t>& hist,
                              std::uint64_t total, unsigned order) {
    if (total == 0 || hist.empty())
        return 0.0;
    // above[k] = #{V > k}
    std::vector<std::uint64_t> above(hist.size(), 0);
    std::uint64_t acc = 0;
    for (std::size_t k = hist.size(); k-- > 0;) {
        above[k] = acc;
        acc += hist[k];
    }
    const double n = static_cast<double>(total);
    NeumaierSum sum;
    const std::size_t lag = order - 1;
    for (std::size_t i = 0; i + lag < hist.size(); ++i) {
        const std::uint64_t c = above[i + lag];
        if (c == 0)
            break;
        sum.add(rising_factorial(i, order - 1) * (static_cast<double>(c) / n));
    }
    return sum.value();
}

WalkStats simulate_walk(const WalkConfig& cfg) {
    cfg.validate();
    const StepTable table(cfg.step);
    const std::uint64_t R = cfg.replicates;
    const std::uint32_t H = cfg.horizon;
    const std::uint64_t blocks = (R + kReplicateBlock - 1) / kReplicateBlock;

    WalkStats st;
    st.horizon = H;
    st.replicates = R;
    st.samples.resize(R);
    std::vector<std::vector<std::uint64_t>> positive(blocks);

    for_each_block(blocks, cfg.threads, [&](std::uint64_t b) {
        CounterRng rng = CounterRng::stream(cfg.seed, b, kWalkStreamDomain);
        auto& pos = positive[b];
        pos.assign(H, 0);
        const std::uint64_t lo = b * kReplicateBlock;
        const std::uint64_t hi = std::min(R, lo + kReplicateBlock);
        for (std::uint64_t r = lo; r < hi; ++r)
            st.samples[r] = walk(table, H, rng, pos.data());
    });

    st.eta_hist.assign(H + 1, 0);
    st.first_max_hist.assign(H + 1, 0);
    for (const PathStats& p : st.samples) {
        ++st.eta_hist[p.eta];
        ++st.first_max_hist[p.first_max];
    }

    std::vector<std::uint64_t> pos_total(H, 0);
    for (const auto& pos : positive)
        for (std::uint32_t i = 0; i < H; ++i)
            pos_total[i] += pos[i];
    const double n = static_cast<double>(R);
    NeumaierSum mn_sum;
    st.m_n.reserve(H);
    for (std::uint32_t i = 0; i < H; ++i) {
        const double m = static_cast<double>(pos_total[i]) / n;
        st.m_n.push_back({i + 1, m, std::sqrt(m * (1.0 - m) / n)});
        mn_sum.add(m / (i + 1));
    }
    st.sum_m_over_n = mn_sum.value();

    for (unsigned N : cfg.orders) {
        WeightedSum w;
        w.order = N;
        w.eta = empirical_weighted_sum(st.eta_hist, R, N);
        w.first_max = empirical_weighted_sum(st.first_max_hist, R, N);
        w.se_eta = replicate_se(st.eta_hist, R, N);
        w.se_first_max = replicate_se(st.first_max_hist, R, N);
        st.weighted_sums.push_back(w);
    }

    if (cfg.step.support_min() >= 0)
        st.notes.push_back(
            "step law has no negative support; the walk cannot drift down and "
            "eta_n, T_n need not settle as n grows");
    else if (cfg.step.mean() >= 0.0)
        st.notes.push_back(
            "step mean is nonnegative; sum m_n / n is not expected to converge");
    return st;
}

EquidistributionReport check_equidistribution(const WalkConfig& cfg,
                                              const WalkStats& st) {
    EquidistributionReport rep;
    rep.gate_threshold = cfg.gate_threshold;
    rep.gate_value = st.m_n.empty() ? 0.0 : st.m_n.back().m;
    rep.resamples = cfg.bootstrap_resamples;
    if (!(rep.gate_value < cfg.gate_threshold))
        throw GateError(
            "series sum m_n/n convergence doubtful at this horizon: "
            "P(S_n > 0) at n=" + std::to_string(st.horizon) + " is " +
                std::to_string(rep.gate_value) + ", gate " +
                std::to_string(cfg.gate_threshold),
            rep.gate_value, cfg.gate_threshold);

    const std::uint64_t R = st.replicates;
    const std::size_t K = cfg.orders.size();
    const unsigned B = cfg.bootstrap_resamples;
    const std::size_t width = st.eta_hist.size();
    // boot[b * K + k] = (eta sum, first_max sum) in resample b, order k.
    std::vector<std::pair<double, double>> boot(static_cast<std::size_t>(B) * K);

    for_each_block(B, cfg.threads, [&](std::uint64_t b) {
        CounterRng rng = CounterRng::stream(cfg.seed, b, kBootstrapDomain);
        std::vector<std::uint64_t> he(width, 0), ht(width, 0);
        for (std::uint64_t r = 0; r < R; ++r) {
            const PathStats& p = st.samples[rng.below(R)];
            ++he[p.eta];
            ++ht[p.first_max];
        }
        for (std::size_t k = 0; k < K; ++k)
            boot[b * K + k] = {empirical_weighted_sum(he, R, cfg.orders[k]),
                               empirical_weighted_sum(ht, R, cfg.orders[k])};
    });

    rep.pass = true;
    for (std::size_t k = 0; k < K; ++k) {
        const unsigned N = cfg.orders[k];
        EquidistributionCheck c;
        c.order = N;
        c.eta = empirical_weighted_sum(st.eta_hist, R, N);
        c.first_max = empirical_weighted_sum(st.first_max_hist, R, N);
        c.diff = c.eta - c.first_max;

        std::vector<double> e(B), t(B), d(B);
        for (unsigned b = 0; b < B; ++b) {
            e[b] = boot[b * K + k].first;
            t[b] = boot[b * K + k].second;
            d[b] = e[b] - t[b];
        }
        c.se_eta = sample_sd(e);
        c.se_first_max = sample_sd(t);
        c.se_diff = sample_sd(d);
        c.combined_se = std::hypot(c.se_eta, c.se_first_max);
        std::sort(d.begin(), d.end());
        c.ci_low = d[static_cast<std::size_t>(std::floor(0.025 * (B - 1)))];
        c.ci_high = d[static_cast<std::size_t>(std::ceil(0.975 * (B - 1)))];
        c.pass = std::abs(c.diff) <= 3.0 * c.combined_se;
        rep.pass = rep.pass && c.pass;
        rep.checks.push_back(c);
    }
    return rep;
}

EquidistributionReport check_equidistribution(const WalkConfig& cfg) {
    return check_equidistribution(cfg, simulate_walk(cfg));
}

}  // namespace dprob
