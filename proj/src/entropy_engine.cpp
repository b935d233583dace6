#include "pel/entropy_engine.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace pel {

namespace {

constexpr std::size_t kMaxAssignmentAtoms = 20;

template <typename T>
T power(const T& base, std::size_t exponent) {
  T result = T(1);
  for (std::size_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

MarkovModel as_chain(const MixedDistribution& dist) {
  std::vector<Rational> probs;
  for (const auto& a : dist.atoms()) probs.push_back(a.prob);
  return MarkovModel::iid(dist.atom_labels(), probs);
}

/// Depth-first walk over every positive-probability sequence of a finite
/// chain, aggregating sequence probabilities by pattern.
class SequenceWalker {
 public:
  SequenceWalker(const MarkovModel& chain, std::size_t n, std::map<Pattern, Rational>& out)
      : chain_(chain), n_(n), out_(out), label_of_(chain.states().size(), 0) {}

  void run() {
    const auto mu = stationary_tuple_law(chain_);
    const auto& lifted = chain_.lifted();
    if (n_ == 0) {
      out_[Pattern()] = 1;
      return;
    }
    for (std::size_t t = 0; t < lifted.tuples.size(); ++t) {
      if (mu[t] == 0) continue;
      const auto& tuple = lifted.tuples[t];
      const std::size_t prefix = std::min(n_, tuple.size());
      std::size_t pushed = 0;
      for (; pushed < prefix; ++pushed) push(tuple[pushed]);
      extend(t, mu[t]);
      for (; pushed > 0; --pushed) pop();
    }
  }

 private:
  void push(std::size_t state) {
    if (label_of_[state] == 0) {
      label_of_[state] = ++distinct_;
      opened_.push_back(true);
    } else {
      opened_.push_back(false);
    }
    seq_.push_back(state);
    labels_.push_back(label_of_[state]);
  }

  void pop() {
    if (opened_.back()) {
      label_of_[seq_.back()] = 0;
      --distinct_;
    }
    opened_.pop_back();
    seq_.pop_back();
    labels_.pop_back();
  }

  void extend(std::size_t tuple, const Rational& prob) {
    if (labels_.size() == n_) {
      out_[Pattern(labels_)] += prob;
      return;
    }
    const auto& row = chain_.rows().at(chain_.lifted().tuples[tuple]);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] == 0) continue;
      push(s);
      extend(chain_.lifted().next_tuple[tuple][s], prob * row[s]);
      pop();
    }
  }

  const MarkovModel& chain_;
  std::size_t n_;
  std::map<Pattern, Rational>& out_;
  std::vector<Pattern::Label> label_of_;
  Pattern::Label distinct_ = 0;
  std::vector<bool> opened_;
  std::vector<std::size_t> seq_;
  std::vector<Pattern::Label> labels_;
};

PatternLaw mixed_iid_law(const MixedDistribution& dist, std::size_t n, std::size_t cap) {
  if (dist.atoms().size() > kMaxAssignmentAtoms) {
    throw UnsupportedSpec("mixed i.i.d. engine supports at most " +
                          std::to_string(kMaxAssignmentAtoms) + " atoms");
  }
  std::vector<Rational> probs;
  for (const auto& a : dist.atoms()) probs.push_back(a.prob);
  PatternLaw law;
  law.n = n;
  std::map<std::vector<std::size_t>, Rational> memo;
  for (const auto& pattern : PatternEnumerator(n, cap)) {
    auto sizes = pattern.multiplicities();
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    auto it = memo.find(sizes);
    if (it == memo.end()) {
      it = memo.emplace(sizes, mixed_iid_pattern_prob(probs, dist.continuous_mass(), sizes)).first;
    }
    if (it->second > 0) law.probs.emplace(pattern, it->second);
  }
  return law;
}

PatternLaw sticky_law(const StickySpec& sticky, std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw CapExceeded("pattern length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
  PatternLaw law;
  law.n = n;
  if (n == 0) {
    law.probs[Pattern()] = 1;
    return law;
  }
  const Rational& rho = sticky.repeat_prob;
  const Rational fresh = Rational(1) - rho;
  // Each step after the first either repeats the last label or opens a new one.
  const std::size_t steps = n - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << steps); ++mask) {
    std::vector<Pattern::Label> labels{1};
    std::size_t repeats = 0;
    for (std::size_t i = 0; i < steps; ++i) {
      if (mask >> i & 1U) {
        labels.push_back(labels.back());
        ++repeats;
      } else {
        labels.push_back(labels.back() + 1);
      }
    }
    const Rational prob = power(rho, repeats) * power(fresh, steps - repeats);
    if (prob > 0) law.probs.emplace(Pattern(std::move(labels)), prob);
  }
  return law;
}

long double log2_safe(long double p) { return p > 0 ? std::log2(p) : 0.0L; }

}  // namespace

template <typename T>
T mixed_iid_pattern_prob(const std::vector<T>& atom_probs, const T& continuous_mass,
                         const std::vector<std::size_t>& class_sizes) {
  const std::size_t atoms = atom_probs.size();
  std::size_t repeated = 0;
  for (const auto size : class_sizes) repeated += size >= 2;
  if (repeated > atoms) return T(0);
  if (continuous_mass == T(0) && class_sizes.size() > atoms) return T(0);

  // dp[mask]: total weight of assignments of the processed classes that use
  // exactly the atoms in mask.
  const std::size_t masks = std::size_t{1} << atoms;
  std::vector<T> dp(masks, T(0));
  std::vector<bool> live(masks, false);
  dp[0] = T(1);
  live[0] = true;
  std::map<std::size_t, std::vector<T>> powers;
  for (const auto size : class_sizes) {
    auto& pw = powers[size];
    if (pw.empty()) {
      for (const auto& p : atom_probs) pw.push_back(power(p, size));
    }
    std::vector<T> next(masks, T(0));
    std::vector<bool> next_live(masks, false);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (!live[mask]) continue;
      if (size == 1 && continuous_mass != T(0)) {
        next[mask] += dp[mask] * continuous_mass;
        next_live[mask] = true;
      }
      for (std::size_t a = 0; a < atoms; ++a) {
        if (mask >> a & 1U) continue;
        const std::size_t to = mask | (std::size_t{1} << a);
        next[to] += dp[mask] * pw[a];
        next_live[to] = true;
      }
    }
    dp = std::move(next);
    live = std::move(next_live);
  }
  T total = T(0);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    if (live[mask]) total += dp[mask];
  }
  return total;
}

template Rational mixed_iid_pattern_prob(const std::vector<Rational>&, const Rational&,
                                         const std::vector<std::size_t>&);
template long double mixed_iid_pattern_prob(const std::vector<long double>&, const long double&,
                                            const std::vector<std::size_t>&);
template double mixed_iid_pattern_prob(const std::vector<double>&, const double&,
                                       const std::vector<std::size_t>&);

Rational PatternLaw::total() const {
  Rational sum = 0;
  for (const auto& [p, q] : probs) sum += q;
  return sum;
}

Rational PatternLaw::prob(const Pattern& p) const {
  const auto it = probs.find(p);
  return it == probs.end() ? Rational(0) : it->second;
}

PatternLaw exact_pattern_law(const ProcessSpec& spec, std::size_t n, std::size_t cap) {
  PatternLaw law;
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    if (iid->dist.is_discrete()) {
      if (n > cap) {
        throw CapExceeded("pattern length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
      }
      law.n = n;
      SequenceWalker(as_chain(iid->dist), n, law.probs).run();
    } else {
      law = mixed_iid_law(iid->dist, n, cap);
    }
  } else if (const auto* markov = std::get_if<MarkovModel>(&spec.body)) {
    if (n > cap) {
      throw CapExceeded("pattern length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
    law.n = n;
    SequenceWalker(*markov, n, law.probs).run();
  } else if (const auto* sticky = std::get_if<StickySpec>(&spec.body)) {
    law = sticky_law(*sticky, n, cap);
  } else {
    throw UnsupportedSpec("no exact pattern law for process kind '" + spec.kind() + "'");
  }
  law.spec_id = spec.id;
  return law;
}

double block_entropy(const PatternLaw& law) {
  long double h = 0;
  for (const auto& [pattern, prob] : law.probs) {
    const long double p = to_long_double(prob);
    if (p > 0) h -= p * std::log2(p);
  }
  return static_cast<double>(std::max(h, 0.0L));
}

double conditional_entropy(const PatternLaw& shorter, const PatternLaw& longer) {
  if (shorter.spec_id != longer.spec_id) {
    throw std::invalid_argument("pattern laws come from different specs");
  }
  if (longer.n != shorter.n + 1) {
    throw std::invalid_argument("pattern law lengths must differ by one");
  }
  return std::max(0.0, block_entropy(longer) - block_entropy(shorter));
}

std::string to_string(Method m) { return m == Method::Exact ? "exact" : "monte_carlo"; }

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Plugin:
      return "plugin";
    case Estimator::MillerMadow:
      return "miller_madow";
    case Estimator::Likelihood:
      return "likelihood";
  }
  return "plugin";
}

Estimator parse_estimator(const std::string& text) {
  if (text == "plugin") return Estimator::Plugin;
  if (text == "miller_madow") return Estimator::MillerMadow;
  if (text == "likelihood") return Estimator::Likelihood;
  throw std::invalid_argument("unknown estimator '" + text + "'");
}

EntropyReport exact_entropy_profile(const ProcessSpec& spec, std::size_t n_min, std::size_t n_max,
                                    std::size_t cap) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("need 1 <= n_min <= n_max");
  EntropyReport report;
  report.spec_id = spec.id;
  double previous = block_entropy(exact_pattern_law(spec, n_min - 1, cap));
  for (std::size_t n = n_min; n <= n_max; ++n) {
    const double h = block_entropy(exact_pattern_law(spec, n, cap));
    EntropyRow row;
    row.n = n;
    row.block_bits = h;
    row.conditional_bits = std::max(0.0, h - previous);
    row.method = Method::Exact;
    report.rows.push_back(row);
    previous = h;
  }
  return report;
}

PatternScorer::PatternScorer(const ProcessSpec& spec) {
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    kind_ = Kind::Iid;
    if (iid->dist.atoms().size() > kMaxAssignmentAtoms) {
      throw UnsupportedSpec("too many atoms for pattern likelihoods");
    }
    for (const auto& a : iid->dist.atoms()) atom_probs_.push_back(to_long_double(a.prob));
    continuous_mass_ = to_long_double(iid->dist.continuous_mass());
  } else if (const auto* sticky = std::get_if<StickySpec>(&spec.body)) {
    kind_ = Kind::Sticky;
    repeat_prob_ = to_long_double(sticky->repeat_prob);
  } else if (const auto* markov = std::get_if<MarkovModel>(&spec.body)) {
    if (!supports(spec)) throw UnsupportedSpec("too many states for pattern likelihoods");
    kind_ = Kind::Markov;
    order_ = markov->order();
    states_ = markov->states().size();
    const auto mu = stationary_tuple_law(*markov);
    const auto& lifted = markov->lifted();
    for (std::size_t t = 0; t < lifted.tuples.size(); ++t) {
      tuple_index_.emplace(lifted.tuples[t], t);
      initial_.push_back(to_long_double(mu[t]));
      std::vector<long double> row;
      for (const auto& p : markov->rows().at(lifted.tuples[t])) row.push_back(to_long_double(p));
      row_.push_back(std::move(row));
    }
    next_ = lifted.next_tuple;
  } else {
    throw UnsupportedSpec("pattern likelihoods are not available for process kind '" + spec.kind() + "'");
  }
}

bool PatternScorer::supports(const ProcessSpec& spec) {
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    return iid->dist.atoms().size() <= kMaxAssignmentAtoms;
  }
  if (std::holds_alternative<StickySpec>(spec.body)) return true;
  if (const auto* markov = std::get_if<MarkovModel>(&spec.body)) return markov->states().size() <= 8;
  return false;
}

long double PatternScorer::probability(const Pattern& pattern) {
  switch (kind_) {
    case Kind::Iid: {
      auto sizes = pattern.multiplicities();
      std::sort(sizes.begin(), sizes.end(), std::greater<>());
      auto it = cache_.find(sizes);
      if (it == cache_.end()) {
        it = cache_.emplace(sizes, mixed_iid_pattern_prob(atom_probs_, continuous_mass_, sizes)).first;
      }
      return it->second;
    }
    case Kind::Sticky: {
      if (pattern.empty()) return 1.0L;
      long double p = 1.0L;
      for (std::size_t i = 1; i < pattern.size(); ++i) {
        if (pattern[i] == pattern[i - 1]) {
          p *= repeat_prob_;
        } else if (pattern[i] == *std::max_element(pattern.labels().begin(), pattern.labels().begin() + i) + 1) {
          p *= 1.0L - repeat_prob_;
        } else {
          return 0.0L;
        }
      }
      return p;
    }
    case Kind::Markov:
      break;
  }
  // Sum over injective maps from labels to states.
  const std::size_t k = pattern.distinct();
  if (pattern.empty()) return 1.0L;
  if (k > states_) return 0.0L;
  std::vector<std::size_t> assign(k, 0);
  std::vector<bool> used(states_, false);
  long double total = 0;
  std::vector<std::size_t> seq(pattern.size());
  auto score = [&]() -> long double {
    for (std::size_t i = 0; i < pattern.size(); ++i) seq[i] = assign[pattern[i] - 1];
    const std::size_t head = std::min(order_, seq.size());
    long double p = 0;
    // Marginalize the first tuple over completions when the pattern is shorter than the order.
    for (const auto& [tuple, t] : tuple_index_) {
      if (!std::equal(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(head), tuple.begin())) continue;
      long double q = initial_[t];
      std::size_t cur = t;
      for (std::size_t i = head; i < seq.size() && q > 0; ++i) {
        q *= row_[cur][seq[i]];
        cur = next_[cur][seq[i]];
        if (cur == LiftedChain::npos) break;
      }
      p += q;
    }
    return p;
  };
  auto recurse = [&](auto&& self, std::size_t label) -> void {
    if (label == k) {
      total += score();
      return;
    }
    for (std::size_t s = 0; s < states_; ++s) {
      if (used[s]) continue;
      used[s] = true;
      assign[label] = s;
      self(self, label + 1);
      used[s] = false;
    }
  };
  recurse(recurse, 0);
  return total;
}

namespace {

/// Per-trajectory pattern class ids at each needed length, built as a trie so
/// that equal prefixes share ids.
struct PatternIds {
  std::vector<std::size_t> lengths;                 // sorted, distinct
  std::vector<std::vector<std::uint32_t>> ids;      // [length index][trajectory]
  std::vector<std::uint32_t> classes;               // distinct ids per length
};

double plugin_from_counts(const std::vector<std::uint32_t>& counts, std::size_t total,
                          Estimator estimator) {
  long double h = 0;
  std::size_t observed = 0;
  const long double m = static_cast<long double>(total);
  for (const auto c : counts) {
    if (c == 0) continue;
    ++observed;
    const long double p = c / m;
    h -= p * std::log2(p);
  }
  if (estimator == Estimator::MillerMadow) {
    h += static_cast<long double>(observed - 1) / (2.0L * m * std::log(2.0L));
  }
  return static_cast<double>(std::max(h, 0.0L));
}

double stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

EntropyReport mc_pattern_entropy(const ProcessSpec& spec, const McOptions& options) {
  if (options.samples < 100) throw std::invalid_argument("Monte Carlo estimation needs at least 100 samples");
  if (options.lengths.empty()) throw std::invalid_argument("no block lengths requested");
  std::vector<std::size_t> needed;
  for (const auto n : options.lengths) {
    if (n == 0) throw std::invalid_argument("block lengths must be positive");
    needed.push_back(n);
    needed.push_back(n - 1);
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  const std::size_t n_max = needed.back();
  const std::size_t m = options.samples;
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, m));
  const bool likelihood = options.estimator == Estimator::Likelihood;
  if (likelihood && !PatternScorer::supports(spec)) {
    throw UnsupportedSpec("likelihood estimator is not available for process kind '" + spec.kind() + "'");
  }

  const TrajectorySampler sampler(spec);
  // Per-trajectory values: -log2 P(Z^n) for the likelihood estimator, or the
  // full pattern labels for frequency estimators.
  std::vector<std::vector<double>> info(needed.size(), std::vector<double>(likelihood ? m : 0));
  std::vector<std::vector<Pattern::Label>> labels(likelihood ? 0 : m);

  std::optional<PatternScorer> prototype;
  if (likelihood) prototype.emplace(spec);
  detail::for_each_block(m, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Generator gen = Generator::substream(options.seed, w);
    std::optional<PatternScorer> scorer = prototype;
    std::vector<std::uint64_t> path;
    for (std::size_t t = begin; t < end; ++t) {
      sampler.codes(n_max, gen, path);
      const Pattern full = pattern_of_values(std::span<const std::uint64_t>(path));
      if (likelihood) {
        for (std::size_t li = 0; li < needed.size(); ++li) {
          const std::size_t n = needed[li];
          const std::vector<Pattern::Label> prefix(full.labels().begin(),
                                                   full.labels().begin() + static_cast<std::ptrdiff_t>(n));
          info[li][t] = static_cast<double>(-log2_safe(scorer->probability(Pattern(prefix))));
        }
      } else {
        labels[t] = full.labels();
      }
    }
  });

  PatternIds trie;
  if (!likelihood) {
    trie.lengths = needed;
    trie.ids.assign(needed.size(), std::vector<std::uint32_t>(m, 0));
    trie.classes.assign(needed.size(), 0);
    std::vector<std::uint32_t> current(m, 0);
    std::size_t li = 0;
    if (needed[0] == 0) {
      trie.classes[0] = 1;
      li = 1;
    }
    std::uint32_t next_id = 1;
    for (std::size_t depth = 1; depth <= n_max; ++depth) {
      std::unordered_map<std::uint64_t, std::uint32_t> child;
      child.reserve(m);
      std::uint32_t base = next_id;
      for (std::size_t t = 0; t < m; ++t) {
        const std::uint64_t key = (std::uint64_t{current[t]} << 32) | labels[t][depth - 1];
        auto [it, inserted] = child.try_emplace(key, next_id);
        if (inserted) ++next_id;
        current[t] = it->second;
      }
      if (li < needed.size() && needed[li] == depth) {
        for (std::size_t t = 0; t < m; ++t) trie.ids[li][t] = current[t] - base;
        trie.classes[li] = next_id - base;
        ++li;
      }
    }
  }

  auto index_of = [&](std::size_t n) {
    return static_cast<std::size_t>(std::lower_bound(needed.begin(), needed.end(), n) - needed.begin());
  };

  // Estimates from a resample given as per-trajectory multiplicities (empty = original sample).
  auto estimate = [&](std::size_t li, const std::vector<std::uint32_t>& weight) -> double {
    if (likelihood) {
      long double sum = 0;
      for (std::size_t t = 0; t < m; ++t) sum += (weight.empty() ? 1 : weight[t]) * static_cast<long double>(info[li][t]);
      return static_cast<double>(sum / static_cast<long double>(m));
    }
    if (needed[li] == 0) return 0.0;
    std::vector<std::uint32_t> counts(trie.classes[li], 0);
    for (std::size_t t = 0; t < m; ++t) counts[trie.ids[li][t]] += weight.empty() ? 1 : weight[t];
    return plugin_from_counts(counts, m, options.estimator);
  };

  std::vector<double> point(needed.size());
  for (std::size_t li = 0; li < needed.size(); ++li) point[li] = estimate(li, {});

  std::vector<std::vector<double>> boot(needed.size());
  if (options.bootstrap > 0) {
    Generator gen = Generator::substream(options.seed, 0x626f6f74ULL);
    std::vector<std::uint32_t> weight(m);
    for (std::size_t b = 0; b < options.bootstrap; ++b) {
      std::fill(weight.begin(), weight.end(), 0);
      for (std::size_t i = 0; i < m; ++i) ++weight[gen.below(m)];
      for (std::size_t li = 0; li < needed.size(); ++li) boot[li].push_back(estimate(li, weight));
    }
  }

  EntropyReport report;
  report.spec_id = spec.id;
  report.estimator = options.estimator;
  for (const auto n : options.lengths) {
    const std::size_t li = index_of(n);
    const std::size_t prev = index_of(n - 1);
    EntropyRow row;
    row.n = n;
    row.block_bits = point[li];
    row.conditional_bits = point[li] - point[prev];
    row.method = Method::MonteCarlo;
    row.samples = m;
    if (options.bootstrap > 0) {
      row.block_stderr = stddev(boot[li]);
      std::vector<double> diff(boot[li].size());
      for (std::size_t b = 0; b < diff.size(); ++b) diff[b] = boot[li][b] - boot[prev][b];
      row.conditional_stderr = stddev(diff);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::vector<BracketRow> hmm_entropy_bracket(const HiddenMarkovModel& model, std::size_t max_n,
                                            std::size_t cap) {
  if (max_n > cap) {
    throw CapExceeded("bracket length " + std::to_string(max_n) + " exceeds cap " + std::to_string(cap));
  }
  const auto& hidden = model.hidden();
  if (hidden.order() != 1) throw UnsupportedSpec("entropy bracket requires a first-order hidden chain");
  const auto& lifted = hidden.lifted();
  const std::size_t states = lifted.tuples.size();
  const std::size_t outputs = model.observations().size();
  const auto mu_exact = stationary_tuple_law(hidden);

  std::vector<long double> mu(states);
  std::vector<std::vector<long double>> trans(states, std::vector<long double>(states));
  std::vector<std::vector<long double>> emit(states, std::vector<long double>(outputs));
  for (std::size_t i = 0; i < states; ++i) {
    mu[i] = to_long_double(mu_exact[i]);
    for (std::size_t j = 0; j < states; ++j) trans[i][j] = to_long_double(lifted.transition[i][j]);
    const std::size_t s = lifted.tuples[i].back();
    for (std::size_t o = 0; o < outputs; ++o) emit[i][o] = to_long_double(model.emission()[s][o]);
  }

  // joint[k] accumulates -sum P log P over observation prefixes of length k,
  // with the forward recursion started from `start`.
  auto block_entropies = [&](const std::vector<long double>& start) {
    std::vector<long double> h(max_n + 1, 0.0L);
    std::vector<std::vector<long double>> alpha(max_n + 1, std::vector<long double>(states));
    auto walk = [&](auto&& self, std::size_t depth) -> void {
      if (depth == max_n) return;
      const auto& prev = alpha[depth];
      auto& cur = alpha[depth + 1];
      for (std::size_t o = 0; o < outputs; ++o) {
        long double total = 0;
        for (std::size_t j = 0; j < states; ++j) {
          long double in = 0;
          if (depth == 0) {
            in = start[j];
          } else {
            for (std::size_t i = 0; i < states; ++i) in += prev[i] * trans[i][j];
          }
          cur[j] = in * emit[j][o];
          total += cur[j];
        }
        if (total <= 0) continue;
        h[depth + 1] -= total * std::log2(total);
        self(self, depth + 1);
      }
    };
    walk(walk, 0);
    return h;
  };

  const auto joint = block_entropies(mu);
  std::vector<long double> given(max_n + 1, 0.0L);
  for (std::size_t x = 0; x < states; ++x) {
    if (mu[x] <= 0) continue;
    std::vector<long double> start(states, 0.0L);
    start[x] = 1.0L;
    const auto h = block_entropies(start);
    for (std::size_t k = 0; k <= max_n; ++k) given[k] += mu[x] * h[k];
  }

  std::vector<BracketRow> rows;
  for (std::size_t k = 1; k <= max_n; ++k) {
    BracketRow row;
    row.n = k;
    row.upper = static_cast<double>(joint[k] - joint[k - 1]);
    row.lower = static_cast<double>(given[k] - given[k - 1]);
    rows.push_back(row);
  }
  return rows;
}

RateReport theoretical_rate(const ProcessSpec& spec, std::size_t bracket_n) {
  RateReport report;
  const auto compliance = check_compliance(spec);
  report.warnings = compliance.warnings;
  auto bracket = [&](const HiddenMarkovModel& hmm) {
    const auto rows = hmm_entropy_bracket(hmm, bracket_n);
    report.lower = rows.back().lower;
    report.upper = rows.back().upper;
    if (*report.upper - *report.lower <= 1e-12) report.rate = *report.upper;
  };
  if (const auto* iid = std::get_if<IidSpec>(&spec.body)) {
    report.rate = entropy(tilde_of(iid->dist));
    report.tilde_rate = report.rate;
    report.basis = "entropy of the clumped single-symbol law";
  } else if (const auto* markov = std::get_if<MarkovModel>(&spec.body)) {
    report.rate = markov_entropy_rate(*markov);
    report.tilde_rate = report.rate;
    report.basis = "Markov entropy rate";
  } else if (const auto* mixed = std::get_if<MixedMarkovModel>(&spec.body)) {
    report.rate = markov_entropy_rate(mixed->tilde_chain());
    report.tilde_rate = report.rate;
    report.basis = "entropy rate of the clumped Markov chain";
  } else if (const auto* sticky = std::get_if<StickySpec>(&spec.body)) {
    const long double rho = to_long_double(sticky->repeat_prob);
    long double h = 0;
    if (rho > 0) h -= rho * std::log2(rho);
    if (rho < 1) h -= (1 - rho) * std::log2(1 - rho);
    report.rate = static_cast<double>(h);
    report.tilde_rate = 0.0;
    report.basis = "binary entropy of the repeat probability (direct pattern chain)";
  } else if (std::holds_alternative<AdditiveNoiseSpec>(spec.body)) {
    const auto tilde = tilde_process(spec);
    bracket(std::get<HiddenMarkovModel>(tilde.body));
    report.basis = "conditional-entropy bracket of the clumped hidden Markov process";
  } else {
    bracket(std::get<HiddenMarkovModel>(spec.body));
    report.basis = "conditional-entropy bracket of the hidden Markov process";
  }
  return report;
}

}  // namespace pel
