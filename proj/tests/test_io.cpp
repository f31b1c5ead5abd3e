#include <doctest.h>

#include "pfaffnet/errors.hpp"
#include "pfaffnet/io.hpp"

using namespace pfaffnet;

namespace {

json small_network() {
    return json::parse(R"({
        "d": 2, "L": 1, "widths": [2], "activation": "tanh",
        "weights": [[1.0, 0.5, -0.25, 2.0]],
        "biases": [[0.1, -0.2]],
        "head": {"c0": 0.3, "c": [1.0, -1.0]}
    })");
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("network documents round trip") {
    auto net = network_from_json(small_network());
    CHECK(net.weight(1)(0, 1) == 0.5);
    CHECK(net.weight(1)(1, 0) == -0.25);
    CHECK(net.bias(1)(1) == -0.2);
    CHECK(net.head_offset() == 0.3);
    auto back = network_from_json(network_to_json(net));
    CHECK(back.identical_to(net));

    auto sampled = sample_network(Architecture{3, {4, 2}}, activation_by_name("softplus"), 5, 1.0);
    CHECK(network_from_json(network_to_json(sampled)).identical_to(sampled));
}

TEST_CASE("malformed network documents") {
    auto j = small_network();
    j["weights"][0].erase(0);
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
    j = small_network();
    j["widths"] = json::array({2, 0});
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
    j = small_network();
    j["head"]["c"] = json::array({1.0});
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
    j = small_network();
    j["activation"] = "relu";
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
    j = small_network();
    j.erase("biases");
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
    j = small_network();
    j["weights"][0][0] = "x";
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
}

TEST_CASE("custom activation declarations") {
    auto j = small_network();
    j["activation"] = json::parse(R"({"name": "tan", "r": 0, "a0": 1, "a1": 0, "a2": 1, "sigma0": 0,
                                      "interval": [-1.2, 1.2]})");
    auto net = network_from_json(j);
    CHECK(net.activation().name() == "tan");
    CHECK(net.activation().analytic_interval().hi == 1.2);
    auto back = network_to_json(net);
    CHECK(back["activation"]["interval"][1] == 1.2);
    j["activation"]["interval"] = json::array({nullptr, nullptr});
    CHECK_THROWS_AS(network_from_json(j), SchemaError);
}

TEST_CASE("certificate dump") {
    auto net = network_from_json(small_network());
    auto doc = certificates_to_json(derive_certificates(net));
    CHECK(doc["R"] == 4);
    CHECK(doc["chain"].size() == 4);
    CHECK(doc["chain"][0]["kind"] == "affine");
    CHECK(doc["chain"][1]["q"] == 0);
    CHECK(doc["certificates"].size() == 8);
    CHECK(doc["certificates"][0]["i"] == 1);
    CHECK(doc["certificates"][0]["p"] == 1);
    CHECK(doc["certificates"][0]["terms"][0][1] == 1.0);
}

TEST_CASE("family documents") {
    auto j = json::parse(R"({
        "d": 2, "m": 2,
        "components": [
            [{"polynomial": [[[0, 0], 1.0]]}, {"polynomial": []}],
            [{"polynomial": []}, {"polynomial": [[[1, 0], 1.0]]}]
        ]
    })");
    auto fam = family_from_json(j);
    auto A = bracket_matrix(fam, 2, std::vector<double>{0.25, 0.0}).columns;
    CHECK(A(1, 1) == 0.25);
    CHECK(A(1, 2) == 1.0);

    auto k = json::parse(R"({"d": 2, "m": 1, "components": [[{"polynomial": [[[1], 1.0]]}, {"polynomial": []}]]})");
    CHECK_THROWS_AS(family_from_json(k), SchemaError);
    k = json::parse(R"({"d": 2, "m": 2, "components": [[{"polynomial": []}, {"polynomial": []}]]})");
    CHECK_THROWS_AS(family_from_json(k), SchemaError);

    auto mixed = json::parse(R"({"d": 2, "m": 1, "components": [[]]})");
    mixed["components"][0].push_back(small_network());
    auto other = small_network();
    other["activation"] = "logistic";
    mixed["components"][0].push_back(other);
    CHECK_THROWS_AS(family_from_json(mixed), SchemaError);
}

}
