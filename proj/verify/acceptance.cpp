#include "acceptance.hpp"

#include "oracles.hpp"
#include "pel/bounds.hpp"
#include "pel/entropy_engine.hpp"
#include "pel/io.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace pel::acceptance {

namespace {

const double kLog2of3 = std::log2(3.0);

class Detail {
 public:
  template <typename T>
  Detail& operator()(const std::string& key, const T& value) {
    if (!text_.empty()) text_ += "; ";
    std::ostringstream os;
    if constexpr (std::is_floating_point_v<T>) {
      os << key << "=" << format_number(static_cast<double>(value));
    } else {
      os << key << "=" << value;
    }
    text_ += os.str();
    return *this;
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

/// Random rational weights in 1..6 normalized to sum to `total`.
std::vector<Rational> random_weights(Generator& gen, std::size_t count, const Rational& total) {
  std::vector<Rational> w;
  Rational sum = 0;
  for (std::size_t i = 0; i < count; ++i) {
    w.emplace_back(static_cast<long long>(gen.below(6) + 1));
    sum += w.back();
  }
  for (auto& x : w) x = x * total / sum;
  return w;
}

std::vector<Symbol> letters(std::size_t k) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

ProcessSpec random_finite_iid(Generator& gen, std::size_t index) {
  const std::size_t k = 2 + gen.below(2);
  const auto probs = random_weights(gen, k, 1);
  std::vector<Atom> atoms;
  const auto labels = letters(k);
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({labels[i], probs[i]});
  return ProcessSpec{"random-iid-" + std::to_string(index), IidSpec{MixedDistribution(atoms, 0)}};
}

ProcessSpec random_finite_markov(Generator& gen, std::size_t index) {
  const std::size_t k = 2 + gen.below(2);
  const std::size_t order = 1 + gen.below(2);
  MarkovModel::Rows rows;
  StateTuple tuple(order, 0);
  for (;;) {
    rows.emplace(tuple, random_weights(gen, k, 1));
    std::size_t i = 0;
    while (i < order && tuple[i] == k - 1) tuple[i++] = 0;
    if (i == order) break;
    ++tuple[i];
  }
  return ProcessSpec{"random-markov-" + std::to_string(index), MarkovModel(order, letters(k), std::move(rows))};
}

ProcessSpec random_mixed_iid(Generator& gen, std::size_t index) {
  const std::size_t k = 1 + gen.below(3);
  const Rational c(static_cast<long long>(gen.below(5) + 1), 8);
  const auto probs = random_weights(gen, k, Rational(1) - c);
  std::vector<Atom> atoms;
  const auto labels = letters(k);
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({labels[i], probs[i]});
  return ProcessSpec{"random-mixed-" + std::to_string(index), IidSpec{MixedDistribution(atoms, c)}};
}

std::vector<std::vector<Symbol>> nonempty_subsets(const std::vector<Symbol>& items) {
  std::vector<std::vector<Symbol>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << items.size()); ++mask) {
    std::vector<Symbol> subset;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (mask >> i & 1U) subset.push_back(items[i]);
    }
    out.push_back(std::move(subset));
  }
  return out;
}

CriterionResult example4_rate(const Options& options) {
  CriterionResult r{1, "ex4-mixed-iid rate", false, "", 0};
  const auto spec = builtin_spec("ex4-mixed-iid");
  const double rate = *theoretical_rate(spec).rate;
  McOptions mc;
  mc.lengths = {64};
  mc.samples = 100000;
  mc.seed = options.seed;
  mc.estimator = Estimator::Likelihood;
  mc.workers = options.workers;
  const auto start = std::chrono::steady_clock::now();
  const auto report = mc_pattern_entropy(spec, mc);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& row = report.rows.front();
  const bool rate_ok = std::fabs(rate - kLog2of3) <= 1e-12;
  const bool mc_ok = std::fabs(row.conditional_bits - kLog2of3) <= 0.05;
  r.passed = rate_ok && mc_ok && seconds <= 60.0;
  r.detail = Detail()("theoretical", rate)("mc_conditional_n64", row.conditional_bits)(
                 "mc_stderr", row.conditional_stderr.value_or(0))("target", kLog2of3)
                 .str();
  return r;
}

CriterionResult example5_rate(const Options&) {
  CriterionResult r{2, "ex5-mixed-markov rate", false, "", 0};
  const auto spec = builtin_spec("ex5-mixed-markov");
  const auto chain = std::get<MixedMarkovModel>(spec.body).tilde_chain();
  const auto mu = stationary_distribution(chain);
  const double mu0 = static_cast<double>(to_long_double(mu.prob(Symbol(Rational(0)))));
  const double mu_half = static_cast<double>(to_long_double(mu.prob(Symbol(Rational(1, 2)))));
  const double mu1 = static_cast<double>(to_long_double(mu.prob(Symbol(Rational(1)))));
  const double rate = markov_entropy_rate(chain);
  const double target = 7.0 / 4.0 - 3.0 / 8.0 * kLog2of3;
  r.passed = std::fabs(rate - target) <= 1e-9 && std::fabs(mu0 - 0.5) <= 1e-10 &&
             std::fabs(mu_half - 1.0 / 6.0) <= 1e-10 && std::fabs(mu1 - 1.0 / 3.0) <= 1e-10;
  r.detail = Detail()("rate", rate)("target", target)("mu(0)", mu0)("mu(1/2)", mu_half)("mu(1)", mu1).str();
  return r;
}

CriterionResult example7_witness(const Options&) {
  CriterionResult r{3, "ex7-sticky witness", false, "", 0};
  const auto spec = builtin_spec("ex7-sticky");
  double worst = 0;
  for (std::size_t n = 2; n <= 12; ++n) {
    const double h = block_entropy(exact_pattern_law(spec, n));
    worst = std::max(worst, std::fabs(h - static_cast<double>(n - 1)));
  }
  const auto rate = theoretical_rate(spec);
  const auto tilde_rate = theoretical_rate(tilde_process(spec));
  r.passed = worst <= 1e-12 && std::fabs(*rate.rate - 1.0) <= 1e-12 && *rate.tilde_rate == 0.0 &&
             *tilde_rate.rate == 0.0 && std::fabs(*rate.rate - *tilde_rate.rate) > 0.5;
  r.detail = Detail()("max|H(Z^n)-(n-1)|", worst)("pattern_rate", *rate.rate)("tilde_rate", *tilde_rate.rate).str();
  return r;
}

CriterionResult bernoulli_oracle(const Options&) {
  CriterionResult r{4, "Bernoulli oracle", false, "", 0};
  const ProcessSpec spec{"bernoulli-1/2", IidSpec{MixedDistribution({{"0", Rational(1, 2)}, {"1", Rational(1, 2)}}, 0)}};
  double worst = 0;
  for (std::size_t n = 2; n <= 12; ++n) {
    worst = std::max(worst, std::fabs(block_entropy(exact_pattern_law(spec, n)) - static_cast<double>(n - 1)));
  }
  const auto law3 = exact_pattern_law(spec, 3);
  const Rational q(1, 4);
  const bool law_ok = law3.prob(Pattern({1, 1, 1})) == q && law3.prob(Pattern({1, 1, 2})) == q &&
                      law3.prob(Pattern({1, 2, 1})) == q && law3.prob(Pattern({1, 2, 2})) == q &&
                      law3.prob(Pattern({1, 2, 3})) == 0;
  const double h3 = block_entropy(law3);
  r.passed = worst <= 1e-12 && law_ok && std::fabs(h3 - 2.0) <= 1e-12;
  r.detail = Detail()("max|H(Z^n)-(n-1)|", worst)("H(Z^3)", h3)("law3_exact", law_ok ? "yes" : "no").str();
  return r;
}

CriterionResult data_processing(const Options& options) {
  CriterionResult r{5, "Data processing", false, "", 0};
  Generator gen(options.seed ^ 0x5ULL);
  double worst_margin = 1e300;
  std::size_t checks = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const ProcessSpec spec = i < 10 ? random_finite_iid(gen, i) : random_finite_markov(gen, i);
    const MarkovModel chain = [&] {
      if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
        std::vector<Rational> probs;
        for (const auto& a : iid->dist.atoms()) probs.push_back(a.prob);
        return MarkovModel::iid(iid->dist.atom_labels(), probs);
      }
      return std::get<MarkovModel>(spec.body);
    }();
    for (std::size_t n = 1; n <= 6; ++n) {
      const double hz = block_entropy(exact_pattern_law(spec, n));
      const double hx = oracle::sequence_block_entropy(chain, n);
      worst_margin = std::min(worst_margin, hx - hz);
      ++checks;
    }
  }
  r.passed = worst_margin >= -1e-12;
  r.detail = Detail()("checks", checks)("min(H(X^n)-H(Z^n))", worst_margin).str();
  return r;
}

CriterionResult single_letter_dominance(const Options& options) {
  CriterionResult r{6, "Single-letter bound dominance", false, "", 0};
  Generator gen(options.seed ^ 0x6ULL);
  std::vector<ProcessSpec> specs{builtin_spec("ex4-mixed-iid")};
  for (std::size_t i = 0; i < 10; ++i) specs.push_back(random_mixed_iid(gen, i));
  double worst_margin = 1e300;
  std::size_t checks = 0;
  for (const auto& spec : specs) {
    const auto& dist = std::get<IidSpec>(spec.body).dist;
    const auto subsets = nonempty_subsets(dist.atom_labels());
    std::vector<double> h;
    for (std::size_t n = 1; n <= 10; ++n) h.push_back(block_entropy(exact_pattern_law(spec, n)));
    for (std::size_t n = 1; n <= 9; ++n) {
      const double conditional = h[n] - h[n - 1];
      for (const auto& b : subsets) {
        worst_margin = std::min(worst_margin, conditional - prop4_lower_bound(dist, b, n));
        ++checks;
      }
    }
  }
  const auto ex4 = std::get<IidSpec>(specs.front().body).dist;
  const auto all = ex4.atom_labels();
  const double at20 = prop4_lower_bound(ex4, all, 20);
  const double expected = kLog2of3 * (1.0 - 2.0 * std::exp(-20.0 / 3.0));
  r.passed = worst_margin >= -1e-12 && std::fabs(at20 - expected) <= 1e-9;
  r.detail = Detail()("checks", checks)("min(H_cond-bound)", worst_margin)("bound_n20", at20)("expected", expected).str();
  return r;
}

CriterionResult waiting_time_sanity(const Options&) {
  CriterionResult r{7, "Waiting-time bound sanity", false, "", 0};
  const double half = waiting_time_entropy_bound(0.5, 0.5);
  double worst = std::fabs(half - 2.0);
  worst = std::max(worst, std::fabs(half - oracle::geometric_entropy(0.5)));
  for (int k = 1; k <= 99; ++k) {
    const double p = k / 100.0;
    worst = std::max(worst, std::fabs(waiting_time_entropy_bound(p, p) - oracle::geometric_entropy(p)));
  }
  r.passed = worst <= 1e-12;
  r.detail = Detail()("bound(1/2,1/2)", half)("max_gap", worst).str();
  return r;
}

CriterionResult growth_surrogate(const Options&) {
  CriterionResult r{8, "Growth-rate surrogate", false, "", 0};
  const double eps = 0.5, delta = 0.75;
  const auto start = std::chrono::steady_clock::now();
  const GrowthDistribution dist(eps);
  const std::vector<std::size_t> grid{1000, 10000, 100000, 1000000};
  const auto curve = theorem5_curve(dist, grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool increasing = true, capped = true;
  double previous = -1;
  Detail detail;
  for (const auto& p : curve) {
    const double ratio = p.bound_bits / std::pow(std::log2(static_cast<double>(p.n)), 1.0 - delta);
    increasing = increasing && ratio > previous;
    capped = capped && p.bound_bits <= std::log2(static_cast<double>(p.n) + 1.0);
    previous = ratio;
    detail("ratio_n" + std::to_string(p.n), ratio);
  }
  r.passed = eps < std::min(delta, 1.0) && increasing && capped && seconds <= 10.0;
  detail("c_eps", dist.c())("c_width", dist.c_hi() - dist.c_lo());
  r.detail = detail.str();
  return r;
}

CriterionResult mixed_engine_oracle(const Options&) {
  CriterionResult r{9, "Mixed i.i.d. oracle", false, "", 0};
  const std::uint64_t k = 10000;
  const std::vector<MixedDistribution> dists{
      MixedDistribution({{"a", Rational(1, 2)}}, Rational(1, 2)),
      std::get<IidSpec>(builtin_spec("ex4-mixed-iid").body).dist,
      MixedDistribution({{"a", Rational(1, 4)}, {"b", Rational(1, 4)}, {"c", Rational(1, 8)}}, Rational(3, 8))};
  double worst_excess = -1e300;
  std::size_t checks = 0;
  for (const auto& dist : dists) {
    const ProcessSpec spec{"mixed", IidSpec{dist}};
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto law = exact_pattern_law(spec, n);
      const auto reference = oracle::discretized_mixed_iid_law(dist, n, k);
      const double tolerance = std::max(3.0 * static_cast<double>(n * (n - 1) / 2) / static_cast<double>(k), 1e-15);
      for (const auto& [pattern, q] : reference) {
        const double gap = std::fabs(static_cast<double>(to_long_double(law.prob(pattern)) - q));
        worst_excess = std::max(worst_excess, gap - tolerance);
        ++checks;
      }
    }
  }
  const auto two = exact_pattern_law(ProcessSpec{"half", IidSpec{dists.front()}}, 2);
  const bool exact_ok = two.probs.size() == 2 && two.prob(Pattern({1, 1})) == Rational(1, 4) &&
                        two.prob(Pattern({1, 2})) == Rational(3, 4);
  r.passed = worst_excess <= 0 && exact_ok;
  r.detail = Detail()("checks", checks)("max(gap-tol)", worst_excess)("n2_exact", exact_ok ? "yes" : "no").str();
  return r;
}

CriterionResult example6_bracket(const Options&) {
  CriterionResult r{10, "ex6-noisy-markov bracket", false, "", 0};
  const auto spec = builtin_spec("ex6-noisy-markov");
  const auto& noisy = std::get<AdditiveNoiseSpec>(spec.body);
  const auto hmm = std::get<HiddenMarkovModel>(tilde_process(spec).body);
  const auto rows = hmm_entropy_bracket(hmm, 12);
  double worst_margin = 1e300;
  double previous_hx = 0;
  for (const auto& row : rows) {
    const double hx = oracle::sequence_block_entropy(noisy.base(), row.n);
    const double conditional = hx - previous_hx;
    previous_hx = hx;
    worst_margin = std::min(worst_margin, row.upper - (1.0 + 0.5 * conditional));
  }

  const auto iid_base = MarkovModel::iid(noisy.base().states(), {Rational(2, 3), Rational(1, 3)});
  const ProcessSpec iid_spec{"ex6-iid", AdditiveNoiseSpec(iid_base, noisy.noise())};
  const auto iid_hmm = std::get<HiddenMarkovModel>(tilde_process(iid_spec).body);
  const double hx = entropy_bits(std::vector<double>{2.0 / 3.0, 1.0 / 3.0});
  const double collapsed = 0.5 * hx + 1.0;
  double worst_collapse = 0;
  for (const auto& row : hmm_entropy_bracket(iid_hmm, 12)) {
    // At n = 1 the lower end is H(Y_1|X_1), the noise entropy alone.
    if (row.n < 2) continue;
    worst_collapse = std::max({worst_collapse, std::fabs(row.upper - collapsed), std::fabs(row.lower - collapsed)});
  }
  r.passed = worst_margin >= -1e-12 && worst_collapse <= 1e-9;
  r.detail = Detail()("min(upper-1-H/2)", worst_margin)("upper_n12", rows.back().upper)("lower_n12", rows.back().lower)(
                 "iid_max_gap", worst_collapse)
                 .str();
  return r;
}

template <typename Fn>
CriterionResult timed(Fn&& fn, const Options& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn(options);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_core(const Options& options) {
  using Fn = CriterionResult (*)(const Options&);
  const std::vector<std::pair<int, Fn>> criteria{
      {1, example4_rate},   {2, example5_rate},  {3, example7_witness},   {4, bernoulli_oracle},
      {5, data_processing}, {6, single_letter_dominance}, {7, waiting_time_sanity},       {8, growth_surrogate},
      {9, mixed_engine_oracle}, {10, example6_bracket}};
  std::vector<CriterionResult> results;
  for (const auto& [id, fn] : criteria) {
    auto r = timed(fn, options);
    r.id = id;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<CriterionResult> run_all(const Options& options) {
  auto results = run_core(options);
  const auto start = std::chrono::steady_clock::now();
  const auto rerun = run_core(options);
  const bool identical = format_report(results) == format_report(rerun);
  CriterionResult r{11, "Determinism", identical, identical ? "rerun report byte-identical" : "rerun report differs",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
  results.push_back(r);
  return results;
}

std::string format_report(const std::vector<CriterionResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += (r.passed ? "PASS " : "FAIL ") + std::to_string(r.id) + " " + r.name + ": " + r.detail + "\n";
  }
  return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace pel::acceptance
