#include "nfg/scenario.hpp"

#include <catch_amalgamated.hpp>

using namespace nfg;
namespace sc = nfg::scenario;

namespace {
sc::Scenario parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  return sc::parse_scenario(sc::Json::parse(text), overrides, ".");
}

const char* clique = R"({
  "name": "clique",
  "mode": "enumerate",
  "params": {"c_A": "1/2", "c_B": "0.5", "A": "2"},
  "enumerate": {"n_A": 0, "n_B": 3},
  "assertions": ["stable_set == {K3}", "stable_count == 1", "optimum >= 9/2"]
})";
}  // namespace

TEST_CASE("enumerate scenario passes its assertions") {
  const auto s = parse(clique);
  CHECK(s.params.link_cost_b() == Rational(1, 2));
  const auto out = sc::run(s);
  CHECK(out.passed());
  CHECK(*out.results.find("stable_set") == "{K3}");
  REQUIRE(out.artifacts.contains("stable.jsonl"));
  CHECK(out.artifacts.at("stable.jsonl").find(s.hash) != std::string::npos);
}

TEST_CASE("runs are byte-identical") {
  const char* dyn = R"({
    "name": "dyn", "mode": "dynamics", "seed": 9,
    "params": {"c_A": "2", "c_B": "2", "A": "4"},
    "dynamics": {"schedule": "BBBAAABBBB", "order": "random"},
    "assertions": ["final == StarOnClique"]
  })";
  const auto a = sc::run(parse(dyn));
  const auto b = sc::run(parse(dyn));
  CHECK(a.artifacts == b.artifacts);
  CHECK(a.passed());
  for (const auto& [name, contents] : a.artifacts) CHECK(contents.find(parse(dyn).hash) != std::string::npos);
}

TEST_CASE("overrides replace existing keys only") {
  const auto s = parse(clique, {"enumerate.n_B=4", "params.c_B=3/4"});
  CHECK(std::get<sc::EnumerateSettings>(s.settings).n_b == 4);
  CHECK(s.params.link_cost_b() == Rational(3, 4));
  CHECK(s.hash != parse(clique).hash);
  CHECK_THROWS_AS(parse(clique, {"enumerate.n_C=4"}), sc::ScenarioError);
  CHECK_THROWS_AS(parse(clique, {"enumerate.n_B=four"}), sc::ScenarioError);
  CHECK_THROWS_AS(parse(clique, {"novalue"}), sc::ScenarioError);
  CHECK(parse(clique, {"assertions.0=stable_count == 2"}).assertions[0].expected == "2");
}

TEST_CASE("failing assertions are reported") {
  const auto out = sc::run(parse(clique, {"assertions.1=stable_count > 1", "assertions.2=missing == 3"}));
  CHECK_FALSE(out.passed());
  CHECK(out.assertions[0].passed);
  CHECK_FALSE(out.assertions[1].passed);
  CHECK(out.assertions[2].actual == "<missing>");
}

TEST_CASE("invalid scenarios are rejected before running") {
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "enumerate"})"), sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "warp", "params": {"c_A": "1", "c_B": "1", "A": "2"}})"),
                  sc::ScenarioError);
  // Importance must exceed one.
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "enumerate", "params": {"c_A": "1", "c_B": "1", "A": "1"},
                           "enumerate": {"n_A": 0, "n_B": 3}})"),
                  sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "enumerate", "params": {"c_A": "1", "c_B": "1", "A": "2"},
                           "enumerate": {"n_A": 5, "n_B": 5}})"),
                  sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "dynamics", "params": {"c_A": "1", "c_B": "1", "A": "2"},
                           "dynamics": {"schedule": "ABX"}})"),
                  sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "dynamics", "params": {"c_A": "1", "c_B": "1", "A": "2"},
                           "dynamics": {"schedule": "AB", "preference": "pref1"}})"),
                  sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "../x", "mode": "enumerate", "params": {"c_A": "1", "c_B": "1", "A": "2"},
                           "enumerate": {"n_A": 0, "n_B": 3}})"),
                  sc::ScenarioError);
  CHECK_THROWS_AS(parse(R"({"name": "x", "mode": "enumerate", "params": {"c_A": "1", "c_B": "1", "A": "2"},
                           "enumerate": {"n_A": 0, "n_B": 3}, "assertions": ["stable_count is 1"]})"),
                  sc::ScenarioError);
}

TEST_CASE("canonical and metrics modes") {
  const auto canon = sc::run(parse(R"({
    "name": "c", "mode": "canonical", "params": {"c_A": "2", "c_B": "2", "A": "4"},
    "canonical": {"kind": "StarOnClique", "n_A": 3, "n_B": 5}
  })"));
  CHECK(*canon.results.find("closed_form_cost") == "221");
  CHECK(*canon.results.find("closed_form_matches") == "true");

  const auto metrics = sc::run(parse(R"({
    "name": "m", "mode": "metrics", "seed": 3,
    "metrics": {"generator": {"name": "g", "model": "preferential_attachment", "n": 20, "m0": 3, "links_per_arrival": 1},
                "core": {"k": 2}}
  })"));
  CHECK(*metrics.results.find("g.links") == "20");
  CHECK(metrics.artifacts.at("metrics.csv").find("snapshot,metric,value_num,value_den") != std::string::npos);
}

TEST_CASE("scenario hash is FNV-1a") {
  CHECK(sc::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(sc::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
