#include <doctest.h>

#include "oracles.hpp"
#include "pel/distribution.hpp"
#include "pel/entropy_engine.hpp"
#include "pel/io.hpp"

#include <cmath>
#include <sstream>

using namespace pel;

namespace {

ProcessSpec iid_spec(std::vector<Atom> atoms, Rational c, const std::string& id = "iid") {
  return ProcessSpec{id, IidSpec{MixedDistribution(std::move(atoms), std::move(c))}};
}

ProcessSpec bernoulli() { return iid_spec({{"0", Rational(1, 2)}, {"1", Rational(1, 2)}}, 0, "bernoulli"); }

ProcessSpec order2_chain() {
  MarkovModel::Rows rows;
  rows[{0, 0}] = {Rational(1, 2), Rational(1, 2)};
  rows[{0, 1}] = {Rational(1, 3), Rational(2, 3)};
  rows[{1, 0}] = {Rational(3, 4), Rational(1, 4)};
  rows[{1, 1}] = {Rational(1, 5), Rational(4, 5)};
  return ProcessSpec{"order2", MarkovModel(2, {Symbol("a"), Symbol("b")}, rows)};
}

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("exact laws of small examples") {
  const auto b3 = exact_pattern_law(bernoulli(), 3);
  CHECK(b3.prob(Pattern({1, 1, 1})) == Rational(1, 4));
  CHECK(b3.prob(Pattern({1, 1, 2})) == Rational(1, 4));
  CHECK(b3.prob(Pattern({1, 2, 1})) == Rational(1, 4));
  CHECK(b3.prob(Pattern({1, 2, 2})) == Rational(1, 4));
  CHECK(b3.prob(Pattern({1, 2, 3})) == 0);
  CHECK(block_entropy(b3) == doctest::Approx(2.0).epsilon(1e-15));

  const auto half = exact_pattern_law(iid_spec({{"a", Rational(1, 2)}}, Rational(1, 2)), 2);
  CHECK(half.prob(Pattern({1, 1})) == Rational(1, 4));
  CHECK(half.prob(Pattern({1, 2})) == Rational(3, 4));

  const auto density = exact_pattern_law(iid_spec({}, 1), 6);
  CHECK(density.probs.size() == 1);
  CHECK(density.prob(Pattern({1, 2, 3, 4, 5, 6})) == 1);
  CHECK(block_entropy(density) == 0.0);
}

TEST_CASE("first symbol carries no information") {
  for (const auto& name : builtin_names()) {
    const auto spec = builtin_spec(name);
    // No exact engine for these kinds.
    if (spec.kind() == "noisy" || spec.kind() == "mixed_markov") continue;
    CHECK(block_entropy(exact_pattern_law(spec, 1)) == 0.0);
  }
}

TEST_CASE("laws sum to one exactly") {
  const std::vector<ProcessSpec> specs{builtin_spec("ex2-finite-iid"), builtin_spec("ex4-mixed-iid"),
                                       builtin_spec("ex7-sticky"), order2_chain(),
                                       iid_spec({{"a", Rational(1, 4)}, {"b", Rational(1, 8)}}, Rational(5, 8))};
  for (const auto& spec : specs) {
    for (std::size_t n = 1; n <= 7; ++n) CHECK(exact_pattern_law(spec, n).total() == 1);
  }
}

TEST_CASE("sticky and Bernoulli block entropies") {
  const auto sticky = builtin_spec("ex7-sticky");
  for (std::size_t n = 2; n <= 12; ++n) {
    const auto longer = exact_pattern_law(sticky, n);
    CHECK(block_entropy(longer) == doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-14));
    CHECK(conditional_entropy(exact_pattern_law(sticky, n - 1), longer) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(block_entropy(exact_pattern_law(bernoulli(), n)) ==
          doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-14));
  }
}

TEST_CASE("conditional entropy argument checks") {
  const auto a = exact_pattern_law(bernoulli(), 3);
  CHECK_THROWS_AS(conditional_entropy(a, exact_pattern_law(bernoulli(), 5)), std::invalid_argument);
  CHECK_THROWS_AS(conditional_entropy(a, exact_pattern_law(builtin_spec("ex2-finite-iid"), 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact_pattern_law(bernoulli(), 13), CapExceeded);
  CHECK_THROWS_AS(exact_pattern_law(builtin_spec("ex6-noisy-markov"), 3), UnsupportedSpec);
}

TEST_CASE("mixed engine at zero continuum matches sequence enumeration") {
  Generator gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = 1 + gen.below(4);
    std::vector<long long> w(k);
    long long sum = 0;
    for (auto& v : w) sum += (v = static_cast<long long>(1 + gen.below(6)));
    std::vector<Rational> probs;
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < k; ++i) {
      probs.emplace_back(w[i], sum);
      atoms.push_back({Symbol("s" + std::to_string(i)), probs.back()});
    }
    const auto law = exact_pattern_law(iid_spec(atoms, 0), 6);
    for (const auto& p : PatternEnumerator(6)) {
      CHECK(mixed_iid_pattern_prob<Rational>(probs, Rational(0), p.multiplicities()) == law.prob(p));
    }
  }
}

TEST_CASE("mixed engine against the discretized continuum") {
  const MixedDistribution f({{"a", Rational(1, 3)}, {"b", Rational(1, 6)}}, Rational(1, 2));
  const std::uint64_t k = 10000;
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto law = exact_pattern_law(ProcessSpec{"f", IidSpec{f}}, n);
    const auto reference = oracle::discretized_mixed_iid_law(f, n, k);
    const double tol = 3.0 * static_cast<double>(n * (n - 1) / 2) / static_cast<double>(k) + 1e-15;
    for (const auto& [p, q] : reference) {
      CHECK(std::fabs(static_cast<double>(to_long_double(law.prob(p)) - q)) <= tol);
    }
  }
}

TEST_CASE("data processing on fixed chains") {
  const auto spec = order2_chain();
  const auto& chain = std::get<MarkovModel>(spec.body);
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(block_entropy(exact_pattern_law(spec, n)) <= oracle::sequence_block_entropy(chain, n) + 1e-12);
  }
}

TEST_CASE("conditional entropies approach the clumped entropy") {
  const std::vector<MixedDistribution> dists{
      std::get<IidSpec>(builtin_spec("ex4-mixed-iid").body).dist,
      MixedDistribution({{"a", Rational(1, 2)}}, Rational(1, 2)),
      MixedDistribution({{"a", Rational(1, 2)}, {"b", Rational(1, 4)}}, Rational(1, 4))};
  for (const auto& f : dists) {
    const ProcessSpec spec{"f", IidSpec{f}};
    const double target = entropy(tilde_of(f));
    const double last = conditional_entropy(exact_pattern_law(spec, 9), exact_pattern_law(spec, 10));
    CHECK(last >= target - 0.01);
  }
}

TEST_CASE("exact profile rows") {
  const auto report = exact_entropy_profile(builtin_spec("ex2-finite-iid"), 1, 6);
  REQUIRE(report.rows.size() == 6);
  CHECK(report.rows[0].block_bits == 0.0);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i].conditional_bits ==
          doctest::Approx(report.rows[i].block_bits - report.rows[i - 1].block_bits));
    CHECK(report.rows[i].method == Method::Exact);
  }
}

TEST_CASE("pattern scorer agrees with exact laws") {
  const std::vector<ProcessSpec> specs{builtin_spec("ex2-finite-iid"), builtin_spec("ex4-mixed-iid"),
                                       builtin_spec("ex7-sticky"), order2_chain()};
  for (const auto& spec : specs) {
    REQUIRE(PatternScorer::supports(spec));
    PatternScorer scorer(spec);
    const auto law = exact_pattern_law(spec, 6);
    for (const auto& p : PatternEnumerator(6)) {
      CHECK(static_cast<double>(scorer.probability(p)) ==
            doctest::Approx(static_cast<double>(to_long_double(law.prob(p)))).epsilon(1e-12));
    }
  }
  CHECK_FALSE(PatternScorer::supports(builtin_spec("ex6-noisy-markov")));
}

TEST_CASE("Monte Carlo degenerate sources") {
  McOptions mc;
  mc.lengths = {1, 5, 20};
  mc.samples = 500;
  mc.seed = 3;
  for (const auto estimator : {Estimator::Plugin, Estimator::Likelihood}) {
    mc.estimator = estimator;
    const auto point = mc_pattern_entropy(iid_spec({{"z", Rational(1)}}, 0), mc);
    const auto density = mc_pattern_entropy(iid_spec({}, 1), mc);
    for (const auto& row : point.rows) CHECK(row.block_bits == 0.0);
    for (const auto& row : density.rows) CHECK(row.block_bits == 0.0);
  }
  mc.samples = 99;
  CHECK_THROWS_AS(mc_pattern_entropy(bernoulli(), mc), std::invalid_argument);
  mc.samples = 500;
  mc.estimator = Estimator::Likelihood;
  CHECK_THROWS_AS(mc_pattern_entropy(builtin_spec("ex6-noisy-markov"), mc), UnsupportedSpec);
}

TEST_CASE("Monte Carlo is reproducible for a fixed seed and worker count") {
  McOptions mc;
  mc.lengths = {4, 8};
  mc.samples = 3000;
  mc.seed = 12;
  mc.workers = 3;
  const auto a = mc_pattern_entropy(builtin_spec("ex4-mixed-iid"), mc);
  const auto b = mc_pattern_entropy(builtin_spec("ex4-mixed-iid"), mc);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("Monte Carlo estimates cover the exact values") {
  // |MC - exact| <= 4 bootstrap standard errors in at least 95% of seeds.
  const std::vector<ProcessSpec> specs{builtin_spec("ex2-finite-iid"), builtin_spec("ex4-mixed-iid")};
  for (const auto& spec : specs) {
    const double exact = block_entropy(exact_pattern_law(spec, 5));
    for (const auto estimator : {Estimator::Plugin, Estimator::MillerMadow, Estimator::Likelihood}) {
      int covered = 0;
      const int reps = 20;
      for (int r = 0; r < reps; ++r) {
        McOptions mc;
        mc.lengths = {5};
        mc.samples = 4000;
        mc.seed = 1000 + static_cast<std::uint64_t>(r);
        mc.estimator = estimator;
        mc.bootstrap = 100;
        const auto row = mc_pattern_entropy(spec, mc).rows.front();
        REQUIRE(row.block_stderr.has_value());
        if (std::fabs(row.block_bits - exact) <= 4 * *row.block_stderr) ++covered;
      }
      CHECK(covered >= 19);
    }
  }
}

TEST_CASE("theoretical rates") {
  CHECK(std::fabs(*theoretical_rate(builtin_spec("ex4-mixed-iid")).rate - std::log2(3.0)) < 1e-12);
  CHECK(std::fabs(*theoretical_rate(builtin_spec("ex5-mixed-markov")).rate - (1.75 - 0.375 * std::log2(3.0))) <
        1e-12);
  const auto sticky = theoretical_rate(builtin_spec("ex7-sticky"));
  CHECK(*sticky.rate == doctest::Approx(1.0));
  CHECK(*sticky.tilde_rate == 0.0);
  CHECK_FALSE(sticky.warnings.empty());
  CHECK(*theoretical_rate(builtin_spec("ex3-uniform")).rate == 0.0);
  const auto noisy = theoretical_rate(builtin_spec("ex6-noisy-markov"));
  REQUIRE(noisy.lower.has_value());
  CHECK(*noisy.lower <= *noisy.upper);
}

TEST_CASE("hidden Markov bracket") {
  const auto hmm = std::get<HiddenMarkovModel>(tilde_process(builtin_spec("ex6-noisy-markov")).body);
  const auto rows = hmm_entropy_bracket(hmm, 12);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].lower <= rows[i].upper + 1e-12);
    if (i > 0) {
      CHECK(rows[i].upper <= rows[i - 1].upper + 1e-12);
      CHECK(rows[i].lower >= rows[i - 1].lower - 1e-12);
    }
  }
  CHECK_THROWS_AS(hmm_entropy_bracket(hmm, 17), CapExceeded);

  SUBCASE("no noise gives the chain rate") {
    const auto ex6 = builtin_spec("ex6-noisy-markov");
    const auto& base = std::get<AdditiveNoiseSpec>(ex6.body).base();
    const ProcessSpec clean{"clean", AdditiveNoiseSpec(base, MixedDistribution({{Symbol(Rational(0)), 1}}, 0))};
    const auto clean_hmm = std::get<HiddenMarkovModel>(tilde_process(clean).body);
    const double rate = markov_entropy_rate(base);
    for (const auto& row : hmm_entropy_bracket(clean_hmm, 10)) {
      if (row.n < 2) continue;
      CHECK(std::fabs(row.upper - rate) < 1e-9);
      CHECK(std::fabs(row.lower - rate) < 1e-9);
    }
  }
}

}  // TEST_SUITE
