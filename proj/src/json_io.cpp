#include "dprob/json_io.hpp"

#include <fstream>
#include <sstream>

#include "dprob/error.hpp"

namespace dprob {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.contains(key))
        throw InvalidArgument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? field<T>(j, key) : fallback;
}

Json optional_number(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json histogram(const std::vector<std::uint64_t>& h) {
    Json out = Json::object();
    for (std::size_t v = 0; v < h.size(); ++v)
        if (h[v] != 0)
            out[std::to_string(v)] = h[v];
    return out;
}

const char* perturbation_name(Perturbation p) {
    switch (p) {
    case Perturbation::none:
        return "none";
    case Perturbation::half_pow:
        return "half_pow";
    case Perturbation::inv_square:
        return "inv_square";
    }
    return "none";
}

const char* step_name(StepLaw s) {
    switch (s) {
    case StepLaw::bernoulli:
        return "bernoulli";
    case StepLaw::poisson:
        return "poisson";
    case StepLaw::constant:
        return "constant";
    }
    return "constant";
}

}  // namespace

Json load_json_arg(const std::string& text) {
    std::string body = text;
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool inline_json =
        first != std::string::npos &&
        (text[first] == '{' || text[first] == '[' || text[first] == '"');
    if (!inline_json) {
        std::ifstream in(text);
        if (!in)
            throw InvalidArgument("cannot read JSON file '" + text + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    try {
        return Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed JSON: ") + e.what());
    }
}

Distribution parse_distribution(const Json& j) {
    if (!j.is_object())
        throw InvalidArgument("distribution descriptor must be a JSON object");
    const auto kind = field<std::string>(j, "kind");
    if (kind == "table")
        return Distribution::table(field<std::vector<double>>(j, "pmf"),
                                   field_or<std::int64_t>(j, "offset", 0));
    if (kind == "bernoulli")
        return Distribution::bernoulli(field<double>(j, "p"));
    if (kind == "binomial")
        return Distribution::binomial(field<std::uint64_t>(j, "n"),
                                      field<double>(j, "p"));
    if (kind == "geometric")
        return Distribution::geometric(field<double>(j, "p"));
    if (kind == "poisson")
        return Distribution::poisson(field<double>(j, "lambda"));
    if (kind == "negative_binomial" || kind == "negbin")
        return Distribution::negative_binomial(field<double>(j, "r"),
                                               field<double>(j, "p"));
    throw InvalidArgument("unknown distribution kind '" + kind + "'");
}

Json to_json(const Distribution& d) {
    Json j;
    switch (d.kind()) {
    case Kind::table:
        j["kind"] = "table";
        j["offset"] = d.offset();
        j["pmf"] = d.table_pmf();
        if (d.normalization_adjustment() != 0.0)
            j["renormalized_by"] = d.normalization_adjustment();
        break;
    case Kind::bernoulli:
        j["kind"] = "bernoulli";
        j["p"] = d.p();
        break;
    case Kind::binomial:
        j["kind"] = "binomial";
        j["n"] = d.trials();
        j["p"] = d.p();
        break;
    case Kind::geometric:
        j["kind"] = "geometric";
        j["p"] = d.p();
        break;
    case Kind::poisson:
        j["kind"] = "poisson";
        j["lambda"] = d.lambda();
        break;
    case Kind::negative_binomial:
        j["kind"] = "negative_binomial";
        j["r"] = d.r();
        j["p"] = d.p();
        break;
    }
    return j;
}

ModelSpec parse_model(const Json& j) {
    if (j.is_string())
        return named_model(j.get<std::string>());
    if (!j.is_object())
        throw InvalidArgument("model must be a registry name or JSON object");
    ModelSpec m;
    const Json means = j.contains("means") ? j.at("means") : Json::object();
    m.limit = field<double>(means, "limit");
    const auto pert = field_or<std::string>(means, "perturbation", "none");
    if (pert == "none")
        m.perturbation = Perturbation::none;
    else if (pert == "half_pow")
        m.perturbation = Perturbation::half_pow;
    else if (pert == "inv_square")
        m.perturbation = Perturbation::inv_square;
    else
        throw InvalidArgument("unknown perturbation '" + pert + "'");
    m.scale = field_or<double>(means, "scale", 0.0);
    const auto step = field_or<std::string>(j, "step", "constant");
    if (step == "bernoulli")
        m.step = StepLaw::bernoulli;
    else if (step == "poisson")
        m.step = StepLaw::poisson;
    else if (step == "constant")
        m.step = StepLaw::constant;
    else
        throw InvalidArgument("unknown step law '" + step + "'");
    m.name = field_or<std::string>(j, "name", "");
    return m;
}

Json to_json(const ModelSpec& m) {
    Json j;
    if (!m.name.empty())
        j["name"] = m.name;
    j["means"] = {{"limit", m.limit},
                  {"perturbation", perturbation_name(m.perturbation)},
                  {"scale", m.scale}};
    j["step"] = step_name(m.step);
    return j;
}

StoppingRule parse_rule(const Json& j) {
    if (!j.is_object())
        throw InvalidArgument("stopping rule must be a JSON object");
    const auto kind = field<std::string>(j, "kind");
    if (kind == "independent") {
        IndependentRule r{parse_distribution(field<Json>(j, "dist")),
                          field_or<std::int64_t>(j, "shift", 0),
                          field_or<std::uint64_t>(j, "cap", 1'000'000)};
        return r;
    }
    if (kind == "threshold")
        return ThresholdRule{field<double>(j, "level"),
                             field_or<std::uint64_t>(j, "cap", 1'000'000)};
    throw InvalidArgument("unknown stopping rule kind '" + kind + "'");
}

Json to_json(const StoppingRule& w) {
    Json j;
    if (auto* ind = std::get_if<IndependentRule>(&w)) {
        j["kind"] = "independent";
        j["dist"] = to_json(ind->dist);
        j["shift"] = ind->shift;
        j["cap"] = ind->cap;
    } else {
        const auto& th = std::get<ThresholdRule>(w);
        j["kind"] = "threshold";
        j["level"] = th.level;
        j["cap"] = th.cap;
    }
    return j;
}

Json to_json(const MomentReport& r) {
    Json j;
    j["N"] = r.order;
    j["direct"] = optional_number(r.direct);
    j["tail_sum"] = optional_number(r.tail_sum);
    j["pgf"] = optional_number(r.pgf);
    j["max_rel_diff"] = r.max_pairwise_rel_diff;
    j["certified"] = r.certified;
    Json errors = Json::object();
    if (r.direct_error)
        errors["direct"] = *r.direct_error;
    if (r.tail_sum_error)
        errors["tail_sum"] = *r.tail_sum_error;
    if (r.pgf_error)
        errors["pgf"] = *r.pgf_error;
    j["errors"] = errors;
    return j;
}

Json to_json(const BoundResult& r) {
    Json j;
    j["x"] = r.x;
    j["bound"] = r.bound;
    j["best_N"] = r.best_order;
    j["clamped"] = r.clamped;
    j["certified"] = r.certified;
    Json cands = Json::array();
    for (const auto& c : r.candidates)
        cands.push_back({{"N", c.order},
                         {"numerator", c.numerator},
                         {"denominator", c.denominator},
                         {"value", c.value},
                         {"numerator_direct", c.numerator_direct},
                         {"check_rel_diff", c.check_rel_diff}});
    j["candidates"] = cands;
    Json skipped = Json::array();
    for (const auto& s : r.skipped)
        skipped.push_back({{"N", s.order}, {"reason", s.reason}});
    j["skipped"] = skipped;
    return j;
}

Json to_json(const IdentityReport& r) {
    Json j;
    j["identity"] = r.identity;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["abs_diff"] = r.abs_diff;
    j["certified"] = r.certified;
    j["interpretation"] = optional_number(r.interpretation);
    return j;
}

Json to_json(const WalkStats& s) {
    Json j;
    j["horizon"] = s.horizon;
    j["replicates"] = s.replicates;
    j["eta_hist"] = histogram(s.eta_hist);
    j["T_hist"] = histogram(s.first_max_hist);
    Json mn = Json::array();
    for (const auto& m : s.m_n)
        mn.push_back({{"n", m.n}, {"m", m.m}, {"se", m.se}});
    j["m_n"] = mn;
    j["sum_m_over_n"] = s.sum_m_over_n;
    Json ws = Json::array();
    for (const auto& w : s.weighted_sums)
        ws.push_back({{"N", w.order},
                      {"eta", w.eta},
                      {"se_eta", w.se_eta},
                      {"T", w.first_max},
                      {"se_T", w.se_first_max}});
    j["weighted_sums"] = ws;
    j["notes"] = s.notes;
    return j;
}

Json to_json(const EquidistributionReport& r) {
    Json j;
    j["gate"] = {{"value", r.gate_value},
                 {"threshold", r.gate_threshold},
                 {"pass", r.gate_value < r.gate_threshold}};
    j["bootstrap_resamples"] = r.resamples;
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"N", c.order},
                          {"eta", c.eta},
                          {"T", c.first_max},
                          {"diff", c.diff},
                          {"se_eta", c.se_eta},
                          {"se_T", c.se_first_max},
                          {"se_diff", c.se_diff},
                          {"combined_se", c.combined_se},
                          {"ci", {c.ci_low, c.ci_high}},
                          {"pass", c.pass}});
    j["checks"] = checks;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const StoppedSumReport& r) {
    Json j;
    j["series_kp"] = r.series_kp;
    j["series_kp_se"] = r.series_kp_se;
    j["series_rearranged"] = r.series_rearranged;
    j["rearranged_parts"] = {r.rearranged_first, r.rearranged_second};
    j["mc_estimate"] = r.mc_estimate;
    j["mc_se"] = r.mc_se;
    j["terms_used"] = {{"kp", r.terms_kp},
                       {"rearranged_first", r.terms_rearranged_first},
                       {"rearranged_second", r.terms_rearranged_second}};
    j["replicates"] = r.replicates;
    j["cap_hits"] = r.cap_hits;
    j["cap_warning"] = r.cap_warning;
    j["certified"] = r.certified;
    j["law_estimated"] = r.law_estimated;
    j["agreement"] = {{"series_abs_diff", r.series_abs_diff},
                      {"series_agree", r.series_agree},
                      {"mc_z", r.mc_z},
                      {"mc_agree", r.mc_agree}};
    j["errors"] = r.errors;
    j["hypotheses"] = {
        "X_n converges in mean to X (asserted by the caller)",
        "w does not depend on the future (enforced by rule kind)",
        "sum P(w >= n) E|X_n| converges (asserted by the caller)"};
    return j;
}

}  // namespace dprob
