#include <doctest.h>

#include "oracles.hpp"
#include "pel/io.hpp"
#include "pel/process.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>

using namespace pel;

namespace {

MarkovModel random_chain(Generator& gen, std::size_t k, bool sparse) {
  std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
  for (std::size_t i = 0; i < k; ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < k; ++j) {
      // A cycle edge keeps sparse chains irreducible.
      const bool keep = !sparse || j == (i + 1) % k || gen.below(2) == 0;
      m[i][j] = keep ? Rational(static_cast<long long>(1 + gen.below(7))) : Rational(0);
      sum += m[i][j];
    }
    for (auto& x : m[i]) x /= sum;
  }
  std::vector<Symbol> states;
  for (std::size_t i = 0; i < k; ++i) states.emplace_back("s" + std::to_string(i));
  return MarkovModel::first_order(states, m);
}

double as_double(const Rational& r) { return static_cast<double>(to_long_double(r)); }

}  // namespace

TEST_SUITE("process") {

TEST_CASE("stationary law examples") {
  const auto sym = MarkovModel::first_order(
      {Symbol("a"), Symbol("b")}, {{Rational(3, 4), Rational(1, 4)}, {Rational(1, 4), Rational(3, 4)}});
  const auto mu = stationary_distribution(sym);
  CHECK(mu.prob(Symbol("a")) == Rational(1, 2));

  const auto chain = std::get<MixedMarkovModel>(builtin_spec("ex5-mixed-markov").body).tilde_chain();
  const auto mu5 = stationary_distribution(chain);
  CHECK(mu5.prob(Symbol(Rational(0))) == Rational(1, 2));
  CHECK(mu5.prob(Symbol(Rational(1, 2))) == Rational(1, 6));
  CHECK(mu5.prob(Symbol(Rational(1))) == Rational(1, 3));

  const auto identity = MarkovModel::first_order({Symbol("a"), Symbol("b")}, {{1, 0}, {0, 1}});
  CHECK_THROWS_AS(stationary_distribution(identity), NonErgodic);
}

TEST_CASE("ex5 tilde chain rows") {
  const auto chain = std::get<MixedMarkovModel>(builtin_spec("ex5-mixed-markov").body).tilde_chain();
  REQUIRE(chain.states().size() == 3);
  const auto i0 = chain.state_index(Symbol(Rational(0)));
  const auto ih = chain.state_index(Symbol(Rational(1, 2)));
  const auto i1 = chain.state_index(Symbol(Rational(1)));
  const auto& row0 = chain.rows().at({i0});
  CHECK(row0[i0] == Rational(3, 4));
  CHECK(row0[ih] == 0);
  CHECK(row0[i1] == Rational(1, 4));
  const auto& rowh = chain.rows().at({ih});
  CHECK(rowh[i0] == Rational(1, 4));
  CHECK(rowh[ih] == Rational(1, 2));
  CHECK(rowh[i1] == Rational(1, 4));
  const auto& row1 = chain.rows().at({i1});
  CHECK(row1[i0] == Rational(1, 4));
  CHECK(row1[ih] == Rational(1, 4));
  CHECK(row1[i1] == Rational(1, 2));
}

TEST_CASE("stationary solve against power iteration") {
  Generator gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto chain = random_chain(gen, 2 + gen.below(5), trial % 2 == 1);
    const auto mu = stationary_distribution(chain);
    const auto reference = oracle::power_iteration_stationary(chain);
    const auto& states = chain.states();
    double residual = 0;
    for (std::size_t j = 0; j < states.size(); ++j) {
      double flow = 0;
      for (std::size_t i = 0; i < states.size(); ++i) {
        flow += as_double(mu.prob(states[i])) * as_double(chain.rows().at({i})[j]);
      }
      residual = std::max(residual, std::fabs(flow - as_double(mu.prob(states[j]))));
      CHECK(std::fabs(as_double(mu.prob(states[j])) - reference[j]) <= 1e-8);
    }
    CHECK(residual <= 1e-10);
    const double rate = markov_entropy_rate(chain);
    CHECK(rate >= 0);
    CHECK(rate <= std::log2(static_cast<double>(states.size())) + 1e-12);
  }
}

TEST_CASE("higher-order stationary tuples") {
  // Order 2 on {a, b}: repeat the last symbol unless the last two differ.
  MarkovModel::Rows rows;
  rows[{0, 0}] = {Rational(1, 2), Rational(1, 2)};
  rows[{0, 1}] = {Rational(1, 3), Rational(2, 3)};
  rows[{1, 0}] = {Rational(3, 4), Rational(1, 4)};
  rows[{1, 1}] = {Rational(1, 5), Rational(4, 5)};
  const MarkovModel chain(2, {Symbol("a"), Symbol("b")}, rows);
  const auto law = stationary_tuple_law(chain);
  Rational sum = 0;
  for (const auto& p : law) sum += p;
  CHECK(sum == 1);
  CHECK_THROWS_AS(stationary_distribution(chain), std::invalid_argument);
  // H(X^4) - H(X^3) equals the rate for a stationary order-2 chain.
  const double increment = oracle::sequence_block_entropy(chain, 4) - oracle::sequence_block_entropy(chain, 3);
  CHECK(std::fabs(increment - markov_entropy_rate(chain)) < 1e-9);
}

TEST_CASE("entropy rate examples") {
  const auto chain = std::get<MixedMarkovModel>(builtin_spec("ex5-mixed-markov").body).tilde_chain();
  CHECK(std::fabs(markov_entropy_rate(chain) - (1.75 - 0.375 * std::log2(3.0))) < 1e-12);

  const auto iid = MarkovModel::iid({Symbol("a"), Symbol("b"), Symbol("c")},
                                    {Rational(1, 2), Rational(1, 4), Rational(1, 4)});
  CHECK(markov_entropy_rate(iid) == doctest::Approx(1.5).epsilon(1e-14));

  const auto cycle = MarkovModel::first_order({Symbol("a"), Symbol("b"), Symbol("c")},
                                              {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  CHECK(markov_entropy_rate(cycle) == 0.0);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(MarkovModel::first_order({Symbol("a"), Symbol("b")}, {{Rational(1, 2), Rational(1, 3)}, {0, 1}}),
                  std::invalid_argument);
  MarkovModel::Rows missing;
  missing[{0, 0}] = {Rational(1, 2), Rational(1, 2)};
  CHECK_THROWS_AS(MarkovModel(2, {Symbol("a"), Symbol("b")}, missing), std::invalid_argument);

  // Rows must share the atom set.
  MixedMarkovModel::Rows rows;
  rows[{0}] = MixedDistribution({{Symbol("a"), Rational(1, 2)}}, Rational(1, 2));
  rows[{1}] = MixedDistribution({{Symbol("b"), Rational(1, 2)}}, Rational(1, 2));
  CHECK_THROWS_AS(MixedMarkovModel(1, {Symbol("a")}, Symbol("x_o"), rows), std::invalid_argument);
}

TEST_CASE("tilde processes of the worked examples") {
  const auto t4 = tilde_process(builtin_spec("ex4-mixed-iid"));
  const auto& d4 = std::get<IidSpec>(t4.body).dist;
  CHECK(d4.is_discrete());
  CHECK(d4.atoms().size() == 3);
  for (const auto& a : d4.atoms()) CHECK(a.prob == Rational(1, 3));

  const auto t6 = tilde_process(builtin_spec("ex6-noisy-markov"));
  const auto& hmm = std::get<HiddenMarkovModel>(t6.body);
  CHECK(hmm.observations().size() == 3);
  for (std::size_t s = 0; s < hmm.emission().size(); ++s) {
    Rational sum = 0;
    for (const auto& p : hmm.emission()[s]) {
      CHECK((p == 0 || p == Rational(1, 2)));
      sum += p;
    }
    CHECK(sum == 1);
  }

  const auto t7 = tilde_process(builtin_spec("ex7-sticky"));
  CHECK(t7.is_discrete());
  CHECK(std::get<IidSpec>(t7.body).dist.atoms().size() == 1);
}

TEST_CASE("simulation") {
  SUBCASE("sticky steps repeat or are fresh") {
    const auto spec = builtin_spec("ex7-sticky");
    const auto seq = simulate(spec, 500, 4);
    std::set<Symbol> seen{seq.front()};
    for (std::size_t i = 1; i < seq.size(); ++i) {
      CHECK(seq[i].is_continuum());
      if (seq[i] != seq[i - 1]) CHECK(seen.insert(seq[i]).second);
    }
  }
  SUBCASE("pure density draws are all distinct") {
    const ProcessSpec spec{"density", IidSpec{MixedDistribution({}, 1)}};
    const auto seq = simulate(spec, 300, 8);
    CHECK(pattern_of(seq).distinct() == 300);
  }
  SUBCASE("same seed, same trajectory") {
    for (const auto& name : builtin_names()) {
      const auto spec = builtin_spec(name);
      CHECK(simulate(spec, 200, 42) == simulate(spec, 200, 42));
    }
  }
  SUBCASE("marginals match the stationary law") {
    // Independent trajectories, one observation each, so counts are multinomial.
    const auto chain = std::get<MixedMarkovModel>(builtin_spec("ex5-mixed-markov").body).tilde_chain();
    const ProcessSpec spec{"ex5-tilde", chain};
    const TrajectorySampler sampler(spec);
    const std::size_t m = 40000;
    std::map<Symbol, std::size_t> counts;
    for (std::size_t t = 0; t < m; ++t) {
      Generator gen = Generator::substream(77, t);
      counts[sampler.symbols(25, gen).back()]++;
    }
    const auto mu = stationary_distribution(chain);
    for (const auto& e : mu.entries()) {
      const double p = as_double(e.prob);
      const double freq = static_cast<double>(counts[e.label]) / m;
      CHECK(std::fabs(freq - p) <= 5 * std::sqrt(p * (1 - p) / m));
    }
  }
}

TEST_CASE("repeat mass") {
  const double sticky = repeat_mass_estimate(builtin_spec("ex7-sticky"), 50, 100000, 9);
  CHECK(std::fabs(sticky - 0.5) <= 5 * std::sqrt(0.25 / 100000));
  CHECK(repeat_mass_estimate(builtin_spec("ex5-mixed-markov"), 50, 20000, 9) == 0.0);
  CHECK(repeat_mass_estimate(builtin_spec("ex2-finite-iid"), 50, 1000, 9) == 0.0);
  CHECK(repeat_mass_estimate(builtin_spec("ex7-sticky"), 50, 20000, 9, 3) ==
        repeat_mass_estimate(builtin_spec("ex7-sticky"), 50, 20000, 9, 3));
}

TEST_CASE("tilde of a discrete spec keeps the pattern law") {
  // Two-sample chi-square on pattern counts at n = 4.
  Generator rng(31);
  const std::vector<ProcessSpec> specs{builtin_spec("ex2-finite-iid"),
                                       ProcessSpec{"chain", random_chain(rng, 3, false)}};
  for (const auto& spec : specs) {
    const auto tilde = tilde_process(spec);
    const std::size_t m = 20000, n = 4;
    std::map<Pattern, std::array<double, 2>> counts;
    const TrajectorySampler a(spec), b(tilde);
    Generator ga(100), gb(200);
    for (std::size_t t = 0; t < m; ++t) {
      counts[pattern_of(a.symbols(n, ga))][0] += 1;
      counts[pattern_of(b.symbols(n, gb))][1] += 1;
    }
    double stat = 0;
    for (const auto& [p, c] : counts) {
      const double pooled = (c[0] + c[1]) / 2.0;
      stat += (c[0] - pooled) * (c[0] - pooled) / pooled + (c[1] - pooled) * (c[1] - pooled) / pooled;
    }
    const double dof = static_cast<double>(counts.size() - 1);
    const double critical = boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), 1e-3));
    CHECK(stat <= critical);
  }
}

TEST_CASE("compliance flags") {
  const auto sticky = check_compliance(builtin_spec("ex7-sticky"));
  CHECK_FALSE(sticky.repeatability);
  CHECK_FALSE(sticky.warnings.empty());
  CHECK(check_compliance(builtin_spec("ex5-mixed-markov")).repeatability);
  CHECK(check_compliance(builtin_spec("ex4-mixed-iid")).repeatability);
  CHECK(decay_advisory({0.5, 0.25, 0.125, 0.0625}).empty());
}

}  // TEST_SUITE
