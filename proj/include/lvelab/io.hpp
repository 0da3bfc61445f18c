#pragma once

// JSON views of the library's results. Keys keep insertion order and no
// field depends on timing or worker count, so equal inputs dump to equal
// bytes.

#include <json.hpp>

#include "lvelab/forest.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/propagator.hpp"
#include "lvelab/ribbon.hpp"
#include "lvelab/series.hpp"
#include "lvelab/wick.hpp"

namespace lvelab::io {

using Json = nlohmann::ordered_json;

Json to_json(const Estimate& e);
Json to_json(const PolynomialInN& p);
/// [{"order": k, "terms": [{"N_power": p, "coefficient": "a/b"}, ...]}, ...]
Json to_json(const SeriesInN& s);
Json to_json(const wick::GenusSplit& g);
Json to_json(const wick::PairingCensus& c);
Json to_json(const forest::Forest& f);
Json to_json(const ribbon::GraphInvariants& inv);
Json to_json(const ribbon::DivergenceDegree& d);
Json to_json(const propagator::PropagatorSpec& spec);
Json to_json(const lve::ResolventAudit& a);
/// {lambda, N, orders: [{n, t_n, error, trees}], partial_sums, oracle, seed, resolvent_audit}
Json to_json(const lve::LveEstimate& e);
Json to_json(const lve::BorelFit& f);
Json to_json(const oracle::SeriesComparison& c);

SeriesInN series_from_json(const Json& j);

}  // namespace lvelab::io
