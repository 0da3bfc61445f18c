#include "lvelab/io.hpp"

#include "lvelab/errors.hpp"

namespace lvelab::io {

Json to_json(const Estimate& e) { return Json{{"value", e.value}, {"error", e.error}}; }

Json to_json(const PolynomialInN& p) {
    Json terms = Json::array();
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
        terms.push_back(Json{{"N_power", it->first}, {"coefficient", to_fraction_string(it->second)}});
    return terms;
}

Json to_json(const SeriesInN& s) {
    Json out = Json::array();
    for (const auto& [k, p] : s.orders()) out.push_back(Json{{"order", k}, {"terms", to_json(p)}});
    return out;
}

Json to_json(const wick::GenusSplit& g) {
    Json out = Json::array();
    for (const auto& [genus, orders] : g) {
        Json rows = Json::array();
        for (const auto& [k, c] : orders) rows.push_back(Json{{"order", k}, {"coefficient", to_fraction_string(c)}});
        out.push_back(Json{{"genus", genus}, {"orders", rows}});
    }
    return out;
}

Json to_json(const wick::PairingCensus& c) {
    auto histogram = [](const std::map<int, std::uint64_t>& m) {
        Json rows = Json::array();
        for (auto [f, n] : m) rows.push_back(Json{{"faces", f}, {"count", n}});
        return rows;
    };
    return Json{{"order", c.order},
                {"pairings", c.total},
                {"connected", c.connected},
                {"connected_by_faces", histogram(c.connected_by_faces)},
                {"all_by_faces", histogram(c.all_by_faces)}};
}

Json to_json(const forest::Forest& f) {
    Json edges = Json::array();
    for (auto e : f.edges()) edges.push_back(Json::array({e.i, e.j}));
    return edges;
}

Json to_json(const ribbon::GraphInvariants& inv) {
    return Json{{"vertices", inv.vertices},         {"edges", inv.edges},
                {"faces", inv.faces},               {"genus", inv.genus},
                {"broken_faces", inv.broken_faces}, {"components", inv.components},
                {"connected", inv.connected},       {"external_legs", inv.external_legs}};
}

Json to_json(const ribbon::DivergenceDegree& d) {
    return Json{{"omega", d.omega},
                {"two_broken_four_point", d.two_broken_four_point},
                {"unclassified_broken_faces", d.unclassified_broken_faces}};
}

Json to_json(const propagator::PropagatorSpec& spec) {
    return Json{{"class", std::string(propagator::to_string(spec.cls))},
                {"omega", spec.omega},
                {"A", spec.mass_constant}};
}

Json to_json(const lve::ResolventAudit& a) {
    return Json{{"samples", a.samples}, {"violations", a.violations}, {"max_norm", a.max_norm}};
}

Json to_json(const lve::LveEstimate& e) {
    Json orders = Json::array();
    for (const auto& o : e.orders)
        orders.push_back(Json{{"n", o.n}, {"t_n", o.t_n}, {"error", o.error}, {"trees", o.trees}});
    Json out{{"lambda", e.lambda}, {"N", e.N}, {"orders", orders}, {"partial_sums", e.partial_sums}};
    out["oracle"] = e.oracle ? to_json(*e.oracle) : Json(nullptr);
    out["seed"] = e.seed ? Json(*e.seed) : Json(nullptr);
    out["resolvent_audit"] = to_json(e.audit);
    return out;
}

Json to_json(const lve::BorelFit& f) {
    return Json{{"C", f.C}, {"K", f.K}, {"residuals", f.residuals}, {"max_residual", f.max_residual}, {"pass", f.pass}};
}

Json to_json(const oracle::SeriesComparison& c) {
    Json rows = Json::array();
    for (const auto& r : c.rows)
        rows.push_back(Json{{"order", r.order},
                            {"N_power", r.power},
                            {"a", to_fraction_string(r.a)},
                            {"b", to_fraction_string(r.b)},
                            {"equal", r.a == r.b}});
    Json out{{"max_order", c.max_order}, {"equal", c.equal}};
    if (c.first_divergence)
        out["first_divergence"] = Json{{"order", c.first_divergence->order},
                                       {"N_power", c.first_divergence->power},
                                       {"a", to_fraction_string(c.first_divergence->a)},
                                       {"b", to_fraction_string(c.first_divergence->b)}};
    else
        out["first_divergence"] = nullptr;
    out["rows"] = rows;
    return out;
}

SeriesInN series_from_json(const Json& j) {
    if (!j.is_array()) throw ContractViolation("series JSON must be an array of orders");
    SeriesInN s;
    for (const auto& order : j) {
        PolynomialInN p;
        for (const auto& t : order.at("terms"))
            p.add(t.at("N_power").get<int>(), parse_fraction(t.at("coefficient").get<std::string>()));
        s.add(order.at("order").get<int>(), p);
    }
    return s;
}

}  // namespace lvelab::io
