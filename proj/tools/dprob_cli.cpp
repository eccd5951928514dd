// dprob: command-line front end for the dprob library.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dprob/error.hpp"
#include "dprob/json_io.hpp"
#include "dprob/selftest.hpp"

using namespace dprob;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kGate = 3 };

struct Global {
    double rel_tol = SeriesPolicy{}.rel_tol;
    double abs_tol = SeriesPolicy{}.abs_tol;
    std::uint64_t max_terms = SeriesPolicy{}.max_terms;
    std::string tail_mode = "certified";
    std::uint64_t seed = 42;
    std::string output = "json";
    unsigned threads = 0;
    std::string out;

    SeriesPolicy policy() const {
        SeriesPolicy p;
        p.rel_tol = rel_tol;
        p.abs_tol = abs_tol;
        p.max_terms = max_terms;
        p.tail_mode = tail_mode == "capped" ? TailMode::capped : TailMode::certified;
        p.validate();
        return p;
    }
};

// Defaults from the JSON file named by DPROB_CONFIG; flags override them.
void apply_config_file(Global& g) {
    const char* path = std::getenv("DPROB_CONFIG");
    if (!path || !*path)
        return;
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument(std::string("cannot read DPROB_CONFIG file ") + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw InvalidArgument(std::string("DPROB_CONFIG: ") + e.what());
    }
    if (!j.is_object())
        throw InvalidArgument("DPROB_CONFIG must hold a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "rel_tol") g.rel_tol = v.get<double>();
        else if (key == "abs_tol") g.abs_tol = v.get<double>();
        else if (key == "max_terms") g.max_terms = v.get<std::uint64_t>();
        else if (key == "tail_mode") g.tail_mode = v.get<std::string>();
        else if (key == "seed") g.seed = v.get<std::uint64_t>();
        else if (key == "output") g.output = v.get<std::string>();
        else if (key == "threads") g.threads = v.get<unsigned>();
        else throw InvalidArgument("DPROB_CONFIG: unknown key '" + key + "'");
    }
}

// Flattened "path: value" lines.
void pretty(std::ostream& os, const Json& j, const std::string& prefix = "") {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            pretty(os, v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i)
            pretty(os, j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        os << prefix << ": " << j.dump() << "\n";
    }
}

class Emitter {
public:
    explicit Emitter(const Global& g) : g_(g) {}

    void json(const Json& j) {
        std::ostringstream os;
        if (g_.output == "pretty")
            pretty(os, j);
        else if (g_.output == "json")
            os << j.dump(2) << "\n";
        else
            throw InvalidArgument("--output csv is only available for bound and walk");
        write(os.str());
    }

    void text(const std::string& s) { write(s); }

private:
    void write(const std::string& s) {
        if (g_.out.empty()) {
            std::cout << s;
            return;
        }
        std::ofstream f(g_.out, std::ios::binary);
        if (!f)
            throw InvalidArgument("cannot open --out file " + g_.out);
        f << s;
    }

    const Global& g_;
};

// A bare registry name, or JSON / a JSON file.
Json model_arg(const std::string& text) {
    for (const auto& name : model_names())
        if (text == name)
            return Json(text);
    return load_json_arg(text);
}

std::string hist_csv(const WalkStats& s) {
    std::ostringstream os;
    os << "value,eta_count,T_count\n";
    for (std::size_t v = 0; v < s.eta_hist.size(); ++v)
        os << v << "," << s.eta_hist[v] << "," << s.first_max_hist[v] << "\n";
    return os.str();
}

std::string profile_csv(const std::vector<ProfileEntry>& entries) {
    std::ostringstream os;
    os.precision(17);
    os << "x,bound,best_N,clamped,certified\n";
    for (const auto& e : entries) {
        os << e.x << ",";
        if (e.result)
            os << e.result->bound << "," << e.result->best_order << ","
               << (e.result->clamped ? 1 : 0) << "," << (e.result->certified ? 1 : 0);
        else
            os << ",,,";
        os << "\n";
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    Global g;
    try {
        apply_config_file(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App app{"Factorial moments, tail bounds, summation identities, walk and "
                 "stopped-sum checks for integer-valued random variables"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.add_option("--rel-tol", g.rel_tol, "relative series tolerance");
    app.add_option("--abs-tol", g.abs_tol, "absolute series tolerance");
    app.add_option("--max-terms", g.max_terms, "series term cap");
    app.add_option("--tail-mode", g.tail_mode, "behaviour at the term cap")
        ->check(CLI::IsMember({"certified", "capped"}));
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--output", g.output)->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--out", g.out, "write output to this path instead of stdout");

    int code = kOk;
    Emitter emit(g);

    // moments
    auto* moments = app.add_subcommand("moments", "factorial moments by three routes");
    std::string m_dist;
    std::vector<unsigned> m_orders{1, 2, 3};
    moments->add_option("--dist", m_dist, "distribution descriptor (JSON or file)")->required();
    moments->add_option("--orders", m_orders)->delimiter(',');
    moments->callback([&] {
        const Distribution d = parse_distribution(load_json_arg(m_dist));
        Json reports = Json::array();
        for (unsigned N : m_orders) {
            if (N == 0)
                throw InvalidArgument("orders must be >= 1");
            const MomentReport r = moment_report(d, N, g.policy());
            if (r.max_pairwise_rel_diff > 1e-6)
                code = kNumeric;
            reports.push_back(to_json(r));
        }
        emit.json({{"distribution", to_json(d)}, {"reports", reports}});
    });

    // bound
    auto* bound = app.add_subcommand("bound", "optimized factorial-moment tail bound");
    std::string b_dist;
    std::vector<double> b_x;
    bound->add_option("--dist", b_dist)->required();
    bound->add_option("--x", b_x, "thresholds")->delimiter(',')->required();
    bound->callback([&] {
        const Distribution d = parse_distribution(load_json_arg(b_dist));
        for (double x : b_x)
            if (!(x > 0.0))
                throw InvalidArgument("x must be > 0");
        const auto profile = bound_profile(d, b_x, g.policy());
        Json results = Json::array();
        for (const auto& e : profile) {
            if (e.result) {
                results.push_back(to_json(*e.result));
            } else {
                code = kNumeric;
                results.push_back({{"x", e.x}, {"error", *e.error}});
            }
        }
        if (g.output == "csv")
            emit.text(profile_csv(profile));
        else
            emit.json({{"distribution", to_json(d)}, {"results", results}});
    });

    // identity
    auto* identity = app.add_subcommand("identity", "summation identities");
    identity->require_subcommand(1);
    double id_tol = 1e-9;
    identity->add_option("--tolerance", id_tol, "exit 2 when |lhs - rhs| exceeds this");
    auto finish_identity = [&](const IdentityReport& r) {
        if (!(r.abs_diff <= id_tol))
            code = kNumeric;
        emit.json(to_json(r));
    };

    auto* leq = identity->add_subcommand("leq", "P(X<=Y) as a cdf-weighted pmf sum");
    std::string l_x, l_y;
    leq->add_option("--x", l_x)->required();
    leq->add_option("--y", l_y)->required();
    leq->callback([&] {
        finish_identity(check_leq_identity(parse_distribution(load_json_arg(l_x)),
                                           parse_distribution(load_json_arg(l_y)),
                                           g.policy()));
    });

    auto* abel = identity->add_subcommand("abel", "PGF against (1-z) sum P(X<=n) z^n");
    std::string a_dist;
    double a_z = 0.5;
    abel->add_option("--dist", a_dist)->required();
    abel->add_option("--z", a_z)->required();
    abel->callback([&] {
        finish_identity(
            check_abel_identity(parse_distribution(load_json_arg(a_dist)), a_z, g.policy()));
    });

    auto* twoseq = identity->add_subcommand("twoseq", "two-sequence summation identity");
    std::string t_pair = "geometric-demo";
    std::string t_model = "geometric-perturbed-bernoulli";
    std::string t_rule =
        R"({"kind":"independent","dist":{"kind":"geometric","p":0.5},"shift":1})";
    twoseq->add_option("--pair", t_pair, "geometric-demo, constant-beta or stopped-demo");
    twoseq->add_option("--model", t_model, "model for stopped-demo");
    twoseq->add_option("--rule", t_rule, "independent rule for stopped-demo");
    twoseq->callback([&] {
        if (t_pair == "stopped-demo") {
            const TriangularModel model = make_model(parse_model(model_arg(t_model)));
            const StoppingRule rule = parse_rule(load_json_arg(t_rule));
            const auto* ind = std::get_if<IndependentRule>(&rule);
            if (!ind)
                throw InvalidArgument("stopped-demo needs an independent rule");
            finish_identity(check_two_sequence_identity(stopped_sequence_pair(model, *ind),
                                                        g.policy()));
        } else {
            finish_identity(check_two_sequence_identity(named_sequence_pair(t_pair),
                                                        g.policy()));
        }
    });

    // walk
    auto* walk = app.add_subcommand("walk", "positivity count against first argmax");
    std::string w_step;
    WalkConfig wc{Distribution::point_mass(-1)};
    std::string w_hist;
    walk->add_option("--step", w_step, "step distribution descriptor")->required();
    walk->add_option("--horizon", wc.horizon);
    walk->add_option("--replicates", wc.replicates);
    walk->add_option("--orders", wc.orders)->delimiter(',');
    walk->add_option("--bootstrap", wc.bootstrap_resamples, "bootstrap resamples");
    walk->add_option("--gate", wc.gate_threshold, "convergence gate threshold");
    walk->add_option("--hist-csv", w_hist, "also write histograms as CSV here");
    walk->callback([&] {
        wc.step = parse_distribution(load_json_arg(w_step));
        wc.seed = g.seed;
        wc.threads = g.threads;
        wc.validate();
        const WalkStats stats = simulate_walk(wc);
        if (!w_hist.empty()) {
            std::ofstream f(w_hist, std::ios::binary);
            if (!f)
                throw InvalidArgument("cannot open --hist-csv file " + w_hist);
            f << hist_csv(stats);
        }
        const EquidistributionReport eq = check_equidistribution(wc, stats);
        if (!eq.pass)
            code = kNumeric;
        if (g.output == "csv")
            emit.text(hist_csv(stats));
        else
            emit.json({{"stats", to_json(stats)}, {"equidistribution", to_json(eq)}});
    });

    // stopped
    auto* stopped = app.add_subcommand("stopped", "expectation of a stopped sum");
    std::string s_model = "iid-constant-mean";
    std::string s_rule;
    std::uint64_t s_reps = 1'000'000;
    stopped->add_option("--model", s_model, "registry name or model JSON");
    stopped->add_option("--rule", s_rule, "stopping rule JSON")->required();
    stopped->add_option("--replicates", s_reps);
    stopped->callback([&] {
        const ModelSpec spec = parse_model(model_arg(s_model));
        const StoppingRule rule = parse_rule(load_json_arg(s_rule));
        const StoppedSumReport r =
            stopped_report(make_model(spec), rule, g.policy(), s_reps, g.seed, g.threads);
        if (!r.series_agree || !r.mc_agree || !r.errors.empty())
            code = kNumeric;
        Json j = to_json(r);
        j["model"] = to_json(spec);
        j["rule"] = to_json(rule);
        emit.json(j);
    });

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the acceptance checks");
    SelftestOptions so;
    selftest->add_option("--walk-replicates", so.walk_replicates);
    selftest->add_option("--stopped-replicates", so.stopped_replicates);
    selftest->callback([&] {
        so.seed = g.seed;
        so.threads = g.threads;
        const auto results = run_selftest(so);
        bool all = true;
        for (const auto& r : results)
            all = all && r.pass;
        if (!all)
            code = kNumeric;
        if (g.output == "pretty") {
            std::ostringstream os;
            for (const auto& r : results)
                os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "\n";
            emit.text(os.str());
        } else {
            emit.json(selftest_json(so, results));
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    } catch (const GateError& e) {
        std::cerr << "convergence gate failed: " << e.what() << "\n";
        return kGate;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumeric;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return code;
}
