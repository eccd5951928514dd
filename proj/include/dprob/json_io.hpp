#pragma once

#include <string>

#include <json.hpp>

#include "dprob/bounds.hpp"
#include "dprob/distribution.hpp"
#include "dprob/identities.hpp"
#include "dprob/moments.hpp"
#include "dprob/stopped.hpp"
#include "dprob/walks.hpp"

namespace dprob {

using Json = nlohmann::ordered_json;

// Inline JSON when the text starts with '{', '[' or '"'; otherwise a path to
// a file holding the JSON. Throws InvalidArgument on parse failure.
Json load_json_arg(const std::string& text);

// {"kind":"poisson","lambda":2} | {"kind":"table","offset":-1,"pmf":[...]}
// | bernoulli {p} | binomial {n,p} | geometric {p} | negative_binomial {r,p}
Distribution parse_distribution(const Json& j);
Json to_json(const Distribution& d);

// A registry name, or {"means":{"limit":..,"perturbation":..,"scale":..},
// "step":"bernoulli"|"poisson"|"constant"}.
ModelSpec parse_model(const Json& j);
Json to_json(const ModelSpec& m);

// {"kind":"independent","dist":{...},"shift":1,"cap":..}
// | {"kind":"threshold","level":5,"cap":..}
StoppingRule parse_rule(const Json& j);
Json to_json(const StoppingRule& w);

Json to_json(const MomentReport& r);
Json to_json(const BoundResult& r);
Json to_json(const IdentityReport& r);
Json to_json(const WalkStats& s);
Json to_json(const EquidistributionReport& r);
Json to_json(const StoppedSumReport& r);

}  // namespace dprob
