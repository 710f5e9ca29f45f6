#pragma once

// JSON encoding of polynomials, weights and rational tuples.

#include <json.hpp>
#include <stdexcept>
#include <variant>

#include "hompoly.hpp"
#include "network.hpp"

namespace ratnet {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using AnyPoly = std::variant<HomPoly<double>, HomPoly<cplx>, HomPoly<Fp>>;
using AnyWeights = std::variant<Weights<double>, Weights<cplx>, Weights<Fp>>;
using AnyTuple = std::variant<RationalTuple<double>, RationalTuple<cplx>, RationalTuple<Fp>>;

json to_json(const HomPoly<double>& p);
json to_json(const HomPoly<cplx>& p);
json to_json(const HomPoly<Fp>& p);
json to_json(const AnyPoly& p);

/// Reads any field; "field" selects it explicitly, otherwise complex when some
/// term carries a nonzero "im", real otherwise.
AnyPoly poly_from_json(const json& j);
HomPoly<cplx> complex_poly_from_json(const json& j);

template <class T>
json to_json(const RationalTuple<T>& t) {
    json j;
    j["numerators"] = json::array();
    for (const auto& p : t.numerators) j["numerators"].push_back(to_json(p));
    j["denominator"] = to_json(t.denominator);
    return j;
}
json to_json(const AnyTuple& t);
AnyTuple tuple_from_json(const json& j);
RationalTuple<cplx> complex_tuple_from_json(const json& j);

json to_json(const Weights<double>& w);
json to_json(const Weights<cplx>& w);
json to_json(const Weights<Fp>& w);
json to_json(const AnyWeights& w);
AnyWeights weights_from_json(const json& j);

/// Promote to complex coefficients.
HomPoly<cplx> to_complex(const AnyPoly& p);
RationalTuple<cplx> to_complex(const AnyTuple& t);
Weights<cplx> to_complex(const AnyWeights& w);

json complex_to_json(cplx v);
cplx complex_from_json(const json& j);

}  // namespace ratnet
