#include <doctest.h>

#include "lvelab/errors.hpp"
#include "lvelab/io.hpp"

using namespace lvelab;

TEST_CASE("series JSON round trip with exact fractions") {
    const auto s = wick::log_z_series(3);
    const auto j = io::to_json(s);
    CHECK(j[0]["order"] == 1);
    CHECK(j[0]["terms"][0]["N_power"] == 2);
    CHECK(j[0]["terms"][0]["coefficient"] == "-2/1");
    CHECK(j[2]["terms"][1]["coefficient"] == "-80/3");
    CHECK(io::series_from_json(j) == s);
    CHECK(io::series_from_json(io::Json::parse(j.dump())) == s);
    CHECK_THROWS_AS(io::series_from_json(io::Json::object()), ContractViolation);
}

TEST_CASE("LveEstimate JSON keeps the documented field order") {
    lve::LveEstimate e;
    e.lambda = 0.05;
    e.orders.push_back({1, -0.04, 1e-8, 1});
    e.partial_sums.push_back(-0.04);
    e.oracle = Estimate{-0.0825, 1e-14};
    const auto j = io::to_json(e);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"lambda", "N", "orders", "partial_sums", "oracle", "seed",
                                           "resolvent_audit"});
    CHECK(j["seed"].is_null());
    CHECK(j["orders"][0]["trees"] == 1);
    CHECK(j["oracle"]["value"] == -0.0825);
}

TEST_CASE("other views") {
    CHECK(io::to_json(forest::Forest(3, {{1, 2}, {2, 3}})).dump() == "[[1,2],[2,3]]");
    const auto spec = io::to_json(propagator::PropagatorSpec{propagator::PropagatorClass::SelfDual, 1.0, 2.0});
    CHECK(spec.dump() == R"({"class":"self-dual","omega":1.0,"A":2.0})");
    const auto census = io::to_json(wick::pairing_census(1));
    CHECK(census["pairings"] == 2);
}
