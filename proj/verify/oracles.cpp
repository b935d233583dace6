#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pel::oracle {

std::uint64_t bell_number(std::size_t n) {
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (const auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::set<Pattern> brute_force_patterns(std::size_t n) {
  // Relabels with a plain lookup array rather than pattern_of, so the
  // comparison does not lean on the code under test.
  std::set<std::vector<Pattern::Label>> seen;
  std::vector<std::size_t> seq(n, 0);
  std::vector<Pattern::Label> labels(n), first(n);
  for (;;) {
    std::fill(first.begin(), first.end(), 0);
    Pattern::Label next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (first[seq[i]] == 0) first[seq[i]] = ++next;
      labels[i] = first[seq[i]];
    }
    seen.insert(labels);
    std::size_t i = 0;
    while (i < n && seq[i] == n - 1) seq[i++] = 0;
    if (i == n) break;
    ++seq[i];
  }
  std::set<Pattern> out;
  for (const auto& l : seen) out.insert(Pattern(l));
  return out;
}

namespace {

std::vector<std::vector<double>> dense_transition(const MarkovModel& chain) {
  const auto& t = chain.lifted().transition;
  std::vector<std::vector<double>> p(t.size(), std::vector<double>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) p[i][j] = t[i][j].convert_to<double>();
  }
  return p;
}

std::vector<double> lifted_stationary(const MarkovModel& chain, std::size_t iterations, double tolerance) {
  const auto p = dense_transition(chain);
  const std::size_t n = p.size();
  std::vector<double> mu(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < iterations; ++it) {
    // Lazy kernel (I + P) / 2 has the same stationary law and is aperiodic.
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] += 0.5 * mu[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += 0.5 * mu[i] * p[i][j];
    }
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::fabs(next[i] - mu[i]));
    mu = std::move(next);
    if (delta < tolerance) break;
  }
  return mu;
}

}  // namespace

std::vector<double> power_iteration_stationary(const MarkovModel& chain, std::size_t iterations,
                                               double tolerance) {
  const auto lifted = lifted_stationary(chain, iterations, tolerance);
  std::vector<double> by_state(chain.states().size(), 0.0);
  const auto& tuples = chain.lifted().tuples;
  for (std::size_t i = 0; i < tuples.size(); ++i) by_state[tuples[i].back()] += lifted[i];
  return by_state;
}

double sequence_block_entropy(const MarkovModel& chain, std::size_t n) {
  const auto mu = lifted_stationary(chain, 100000, 1e-15);
  const auto& tuples = chain.lifted().tuples;
  const std::size_t m = chain.order();
  const std::size_t k = chain.states().size();
  // Probability of every length-n sequence, keyed by the sequence itself.
  std::map<std::vector<std::size_t>, long double> probs;
  std::vector<std::size_t> seq;
  std::function<void(std::size_t, long double)> walk = [&](std::size_t tuple, long double p) {
    if (seq.size() == n) {
      probs[seq] += p;
      return;
    }
    const auto& row = chain.rows().at(tuples[tuple]);
    for (std::size_t s = 0; s < k; ++s) {
      const long double q = row[s].convert_to<long double>();
      if (q == 0) continue;
      seq.push_back(s);
      walk(chain.lifted().next_tuple[tuple][s], p * q);
      seq.pop_back();
    }
  };
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    if (mu[t] <= 0) continue;
    seq.assign(tuples[t].begin(), tuples[t].begin() + static_cast<std::ptrdiff_t>(std::min(m, n)));
    walk(t, mu[t]);
  }
  long double h = 0;
  for (const auto& [s, p] : probs) {
    if (p > 0) h -= p * std::log2(p);
  }
  return static_cast<double>(h);
}

std::map<Pattern, long double> discretized_mixed_iid_law(const MixedDistribution& dist, std::size_t n,
                                                         std::uint64_t k) {
  std::vector<long double> atom;
  for (const auto& a : dist.atoms()) atom.push_back(a.prob.convert_to<long double>());
  const long double tiny = dist.continuous_mass().convert_to<long double>() / static_cast<long double>(k);

  std::map<Pattern, long double> law;
  for (const auto& pattern : PatternEnumerator(n, 12)) {
    const auto sizes = pattern.multiplicities();
    const std::size_t classes = sizes.size();
    // choice[c] < atom.size(): original atom; == atom.size(): a pool atom.
    std::vector<std::size_t> choice(classes, 0);
    long double total = 0;
    std::function<void(std::size_t, long double, std::uint64_t, std::vector<bool>&)> assign =
        [&](std::size_t c, long double weight, std::uint64_t pool_used, std::vector<bool>& used) {
          if (c == classes) {
            total += weight;
            return;
          }
          for (std::size_t a = 0; a < atom.size(); ++a) {
            if (used[a]) continue;
            used[a] = true;
            assign(c + 1, weight * std::pow(atom[a], static_cast<long double>(sizes[c])), pool_used, used);
            used[a] = false;
          }
          if (tiny > 0 && pool_used < k) {
            // Distinct pool atom for this class: (k - pool_used) choices.
            const long double ways = static_cast<long double>(k - pool_used);
            assign(c + 1, weight * ways * std::pow(tiny, static_cast<long double>(sizes[c])), pool_used + 1, used);
          }
        };
    std::vector<bool> used(atom.size(), false);
    assign(0, 1.0L, 0, used);
    law[pattern] = total;
  }
  return law;
}

double geometric_entropy(double p) {
  if (p == 1.0) return 0.0;
  const double h = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
  return h / p;
}

}  // namespace pel::oracle
