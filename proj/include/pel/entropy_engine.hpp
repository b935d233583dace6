#pragma once

#include "pel/pattern.hpp"
#include "pel/process.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pel {

/// Exact law of Z^n for one process.
struct PatternLaw {
  std::string spec_id;
  std::size_t n = 0;
  /// Only patterns with positive probability are stored.
  std::map<Pattern, Rational> probs;

  Rational total() const;
  Rational prob(const Pattern& p) const;
};

/// Exact law of Z^n. Finite discrete sources (i.i.d. with no continuous part,
/// finite Markov) enumerate every source sequence; mixed i.i.d. sources sum
/// over injective assignments of pattern cells to atoms; sticky sources use
/// the closed form. Throws CapExceeded when n > cap and UnsupportedSpec for
/// other process kinds.
PatternLaw exact_pattern_law(const ProcessSpec& spec, std::size_t n,
                             std::size_t cap = kDefaultEnumerationCap);

/// Probability that a mixed i.i.d. source produces any fixed pattern whose
/// label classes have the given sizes. Cells used more than once must land on
/// distinct atoms; singleton cells may also fall in the continuous part.
template <typename T>
T mixed_iid_pattern_prob(const std::vector<T>& atom_probs, const T& continuous_mass,
                         const std::vector<std::size_t>& class_sizes);

/// H(Z^n) in bits.
double block_entropy(const PatternLaw& law);

/// H(Z_n | Z^{n-1}) = H(Z^n) - H(Z^{n-1}). Throws std::invalid_argument when
/// the laws come from different specs or lengths do not differ by one.
double conditional_entropy(const PatternLaw& shorter, const PatternLaw& longer);

enum class Method { Exact, MonteCarlo };
enum class Estimator {
  Plugin,       ///< entropy of empirical pattern frequencies
  MillerMadow,  ///< plug-in plus (K - 1) / (2 M ln 2)
  Likelihood,   ///< sample mean of -log2 P(Z^n) using exact pattern probabilities
};

std::string to_string(Method m);
std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& text);

struct EntropyRow {
  std::size_t n = 0;
  double block_bits = 0;
  double conditional_bits = 0;
  Method method = Method::Exact;
  std::optional<double> block_stderr;
  std::optional<double> conditional_stderr;
  std::size_t samples = 0;
};

struct EntropyReport {
  std::string spec_id;
  Estimator estimator = Estimator::Plugin;
  std::vector<EntropyRow> rows;
};

/// Exact rows for n = n_min..n_max.
EntropyReport exact_entropy_profile(const ProcessSpec& spec, std::size_t n_min, std::size_t n_max,
                                    std::size_t cap = kDefaultEnumerationCap);

struct McOptions {
  /// Block lengths to report; each row's conditional value differences
  /// against length n - 1, which is estimated from the same trajectories.
  std::vector<std::size_t> lengths;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::Plugin;
  std::size_t bootstrap = 200;
  std::size_t workers = 1;
};

/// Monte Carlo pattern entropies. Throws std::invalid_argument when samples < 100
/// and UnsupportedSpec when the likelihood estimator is asked for a process
/// whose pattern probabilities cannot be evaluated.
EntropyReport mc_pattern_entropy(const ProcessSpec& spec, const McOptions& options);

/// Evaluates P(Z^n = pattern) for i.i.d., sticky and small finite Markov
/// sources. Copies are independent; each keeps its own cache.
class PatternScorer {
 public:
  explicit PatternScorer(const ProcessSpec& spec);
  static bool supports(const ProcessSpec& spec);
  long double probability(const Pattern& pattern);

 private:
  enum class Kind { Iid, Sticky, Markov };
  Kind kind_ = Kind::Iid;
  std::vector<long double> atom_probs_;
  long double continuous_mass_ = 0;
  long double repeat_prob_ = 0.5L;
  std::map<std::vector<std::size_t>, long double> cache_;
  // Markov tables
  std::size_t order_ = 1;
  std::size_t states_ = 0;
  std::map<StateTuple, std::size_t> tuple_index_;
  std::vector<long double> initial_;
  std::vector<std::vector<long double>> row_;
  std::vector<std::vector<std::size_t>> next_;
};

struct RateReport {
  /// Pattern entropy rate in bits per symbol, when the process has a closed form.
  std::optional<double> rate;
  /// Entropy rate of the tilde process.
  std::optional<double> tilde_rate;
  /// Conditional-entropy bracket, for hidden Markov reductions.
  std::optional<double> lower;
  std::optional<double> upper;
  std::string basis;
  std::vector<std::string> warnings;
};

/// Pattern entropy rate by the reduction that applies to the process kind.
RateReport theoretical_rate(const ProcessSpec& spec, std::size_t bracket_n = 12);

struct BracketRow {
  std::size_t n = 0;
  double lower = 0;  ///< H(Y_n | Y^{n-1}, X_1)
  double upper = 0;  ///< H(Y_n | Y^{n-1})
};

inline constexpr std::size_t kDefaultBracketCap = 16;

/// Exact bracket rows for n = 1..max_n by forward recursion over every
/// observation prefix. Requires a first-order hidden chain.
std::vector<BracketRow> hmm_entropy_bracket(const HiddenMarkovModel& model, std::size_t max_n,
                                            std::size_t cap = kDefaultBracketCap);

}  // namespace pel
