#include <doctest.h>

#include "pel/io.hpp"

#include <sstream>

using namespace pel;

TEST_SUITE("io") {

TEST_CASE("rational text") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("2") == Rational(2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-1/3") == Rational(-1, 3));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK(format_rational(Rational(6, 8)) == "3/4");
  CHECK(format_rational(Rational(5)) == "5");
}

TEST_CASE("symbols in JSON") {
  CHECK(symbol_from_json(Json("a")) == Symbol("a"));
  CHECK(symbol_from_json(Json(3)) == Symbol(Rational(3)));
  CHECK(symbol_from_json(Json{{"rational", "1/2"}}) == Symbol(Rational(1, 2)));
  CHECK(symbol_to_json(Symbol(Rational(1, 2))) == Json{{"rational", "1/2"}});
  CHECK_THROWS_AS(symbol_from_json(Json(0.5)), SchemaError);
}

TEST_CASE("built-in specs survive a JSON round trip") {
  for (const auto& name : builtin_names()) {
    const auto spec = builtin_spec(name);
    CHECK(spec.id == name);
    const auto j = spec_to_json(spec);
    const auto back = spec_from_json(j);
    CHECK(back.id == spec.id);
    CHECK(back.kind() == spec.kind());
    CHECK(spec_to_json(back) == j);
  }
  CHECK_THROWS_AS(builtin_spec("ex9"), std::invalid_argument);
}

TEST_CASE("built-in parameters") {
  const auto ex4 = std::get<IidSpec>(builtin_spec("ex4-mixed-iid").body).dist;
  CHECK(ex4.atom_prob(Symbol(Rational(0))) == Rational(1, 3));
  CHECK(ex4.atom_prob(Symbol(Rational(1))) == Rational(1, 3));
  CHECK(ex4.continuous_mass() == Rational(1, 3));
  CHECK(std::get<StickySpec>(builtin_spec("ex7-sticky").body).repeat_prob == Rational(1, 2));
  CHECK(std::get<IidSpec>(builtin_spec("ex3-uniform").body).dist.continuous_mass() == 1);
  const auto ex6 = builtin_spec("ex6-noisy-markov");
  const auto& noise = std::get<AdditiveNoiseSpec>(ex6.body).noise();
  CHECK(noise.continuous_mass() == Rational(1, 2));
  CHECK(noise.atom_prob(Symbol(Rational(0))) == Rational(1, 2));
}

TEST_CASE("spec documents") {
  const auto spec = spec_from_json(Json::parse(R"({
    "kind": "markov", "id": "flip",
    "states": ["a", "b"],
    "rows": [{"from": ["a"], "probs": ["1/4", "3/4"]}, {"from": ["b"], "probs": [1, 0]}]
  })"));
  CHECK(spec.id == "flip");
  const auto& m = std::get<MarkovModel>(spec.body);
  CHECK(m.rows().at({0})[1] == Rational(3, 4));

  const auto mixed = spec_from_json(Json::parse(R"({
    "kind": "iid", "distribution": {"atoms": [{"label": 0, "prob": "1/3"}, {"label": 1, "prob": "1/3"}],
                                    "continuous_mass": "1/3"}})"));
  CHECK(std::get<IidSpec>(mixed.body).dist.continuous_mass() == Rational(1, 3));

  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"kind": "nope"})")), SchemaError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"distribution": {}})")), SchemaError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"kind": "sticky", "repeat_prob": "1"})")), SchemaError);
  CHECK_THROWS_AS(
      spec_from_json(Json::parse(R"({"kind": "iid", "distribution": {"atoms": [{"label": "a", "prob": "1/2"}],
                                      "continuous_mass": "1/3"}})")),
      SchemaError);
  CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), SchemaError);
}

TEST_CASE("report formats") {
  const auto report = exact_entropy_profile(builtin_spec("ex7-sticky"), 1, 3);
  std::ostringstream os;
  write_csv(os, report);
  CHECK(os.str() ==
        "# pel entropy-report v1 estimator=plugin\n"
        "n,H_block_bits,H_cond_bits,method,stderr,samples,spec_id\n"
        "1,0,0,exact,,0,ex7-sticky\n"
        "2,1,1,exact,,0,ex7-sticky\n"
        "3,2,1,exact,,0,ex7-sticky\n");
  const auto j = to_json(report);
  CHECK(j.at("rows").size() == 3);

  const GrowthDistribution g(0.5);
  const std::vector<std::size_t> grid{1000};
  std::ostringstream curve;
  write_csv(curve, theorem5_curve(g, grid), 0.5);
  CHECK(curve.str().rfind("# pel bound-curve v1 eps=0.5\nn,bound_bits,argmax_l\n1000,", 0) == 0);

  std::ostringstream rate;
  write_csv(rate, theoretical_rate(builtin_spec("ex5-mixed-markov")), "ex5-mixed-markov");
  CHECK(rate.str().find("rate_bits,1.15563906222957,ex5-mixed-markov") != std::string::npos);
  CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
}

}  // TEST_SUITE
