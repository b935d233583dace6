#pragma once

#include "pel/distribution.hpp"
#include "pel/pattern.hpp"
#include "pel/rng.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pel {

/// Raised when a chain is not irreducible, so no unique stationary law exists.
class NonErgodic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation does not support the given process kind.
class UnsupportedSpec : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using StateTuple = std::vector<std::size_t>;

/// Order-m chain lifted to a first-order chain on the m-tuples that carry rows.
struct LiftedChain {
  std::vector<StateTuple> tuples;
  /// transition[i][j]: probability of moving from tuples[i] to tuples[j].
  std::vector<std::vector<Rational>> transition;
  /// next_state[i][s]: index of the tuple reached from tuples[i] by emitting
  /// state s, or npos when that emission has zero probability.
  std::vector<std::vector<std::size_t>> next_tuple;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Finite-alphabet Markov chain of order m. Rows map a state m-tuple (indices
/// into states()) to a probability vector over states().
class MarkovModel {
 public:
  using Rows = std::map<StateTuple, std::vector<Rational>>;

  MarkovModel() = default;
  /// Throws std::invalid_argument when a row does not sum to 1, has the wrong
  /// width, or a positive-probability transition leads to a tuple with no row.
  MarkovModel(std::size_t order, std::vector<Symbol> states, Rows rows);

  /// First-order chain from a row-stochastic matrix.
  static MarkovModel first_order(std::vector<Symbol> states,
                                 const std::vector<std::vector<Rational>>& matrix);
  /// Memoryless chain whose every row is `probs`.
  static MarkovModel iid(std::vector<Symbol> states, const std::vector<Rational>& probs);

  std::size_t order() const { return order_; }
  const std::vector<Symbol>& states() const { return states_; }
  const Rows& rows() const { return rows_; }
  std::size_t state_index(const Symbol& s) const;

  const LiftedChain& lifted() const { return lifted_; }

 private:
  std::size_t order_ = 1;
  std::vector<Symbol> states_;
  Rows rows_;
  LiftedChain lifted_;
};

/// Markov chain on a mixed alphabet: every row shares the atom set S and all
/// rows indexed by tuples containing the reserved symbol x_o agree. In tuple
/// keys, index atoms().size() stands for x_o (any continuum value).
class MixedMarkovModel {
 public:
  using Rows = std::map<StateTuple, MixedDistribution>;

  MixedMarkovModel() = default;
  /// Throws std::invalid_argument if a row's atom support differs from S or
  /// two rows indexed by continuum-containing tuples differ.
  MixedMarkovModel(std::size_t order, std::vector<Symbol> atoms, Symbol reserved, Rows rows);

  std::size_t order() const { return order_; }
  const std::vector<Symbol>& atoms() const { return atoms_; }
  const Symbol& reserved_label() const { return reserved_; }
  const Rows& rows() const { return rows_; }
  std::size_t continuum_index() const { return atoms_.size(); }

  /// Discrete chain over S plus x_o with rows Phi_S[f_state].
  MarkovModel tilde_chain() const;

 private:
  std::size_t order_ = 1;
  std::vector<Symbol> atoms_;
  Symbol reserved_;
  Rows rows_;
};

/// Finite-alphabet Markov source corrupted by i.i.d. additive noise with
/// finitely many noise atoms. Base states and noise atoms are exact rationals.
class AdditiveNoiseSpec {
 public:
  AdditiveNoiseSpec() = default;
  AdditiveNoiseSpec(MarkovModel base, MixedDistribution noise);

  const MarkovModel& base() const { return base_; }
  const MixedDistribution& noise() const { return noise_; }
  /// S_Y = {x + n : x a base state, n a noise atom}, sorted.
  const std::vector<Rational>& output_atoms() const { return output_atoms_; }

 private:
  MarkovModel base_;
  MixedDistribution noise_;
  std::vector<Rational> output_atoms_;
};

/// Finite hidden Markov source. Emission depends on the most recent hidden state.
class HiddenMarkovModel {
 public:
  HiddenMarkovModel() = default;
  /// emission[s][o]: probability of observation o from hidden state s.
  HiddenMarkovModel(MarkovModel hidden, std::vector<Symbol> observations,
                    std::vector<std::vector<Rational>> emission);

  const MarkovModel& hidden() const { return hidden_; }
  const std::vector<Symbol>& observations() const { return observations_; }
  const std::vector<std::vector<Rational>>& emission() const { return emission_; }

 private:
  MarkovModel hidden_;
  std::vector<Symbol> observations_;
  std::vector<std::vector<Rational>> emission_;
};

/// Repeats the previous value with probability repeat_prob, otherwise draws a
/// fresh continuum value.
struct StickySpec {
  Rational repeat_prob{1, 2};
};

struct IidSpec {
  MixedDistribution dist;
};

/// Tagged union of generative processes, plus an identifier used in reports.
struct ProcessSpec {
  using Body =
      std::variant<IidSpec, MarkovModel, MixedMarkovModel, AdditiveNoiseSpec, StickySpec, HiddenMarkovModel>;

  std::string id;
  Body body;

  /// "iid", "markov", "mixed_markov", "noisy", "sticky" or "hidden_markov".
  std::string kind() const;
  /// True when every symbol the process emits comes from a finite atom set.
  bool is_discrete() const;
};

/// Stationary law of a first-order chain. Throws NonErgodic for reducible chains
/// and std::invalid_argument for order > 1.
DiscreteDistribution stationary_distribution(const MarkovModel& chain);

/// Stationary law over the lifted tuples of an order-m chain, by an exact
/// linear solve with the normalization row replacing one balance equation.
std::vector<Rational> stationary_tuple_law(const MarkovModel& chain);

/// Sum over tuples of mu(tuple) * H(row(tuple)), in bits per symbol.
double markov_entropy_rate(const MarkovModel& chain);

/// Discrete proxy process with every non-atom value replaced by a reserved symbol.
ProcessSpec tilde_process(const ProcessSpec& spec);

/// Precomputed sampling tables for repeated trajectory draws from one spec.
/// Trajectories can be produced as Symbols or as integer codes: codes below
/// kContinuumCode index symbol_table(); continuum draws carry the bit and
/// their token serial.
class TrajectorySampler {
 public:
  static constexpr std::uint64_t kContinuumCode = std::uint64_t{1} << 63;

  /// Throws NonErgodic when a chain has no unique stationary law.
  explicit TrajectorySampler(const ProcessSpec& spec);

  void codes(std::size_t n, Generator& gen, std::vector<std::uint64_t>& out) const;
  SequenceBlock symbols(std::size_t n, Generator& gen) const;
  Symbol symbol_of(std::uint64_t code, const Generator& gen) const;
  const std::vector<Symbol>& symbol_table() const { return table_; }

 private:
  struct Chain {
    std::size_t order = 1;
    std::vector<double> initial;                  // cumulative over tuples
    std::vector<StateTuple> tuples;
    std::vector<std::vector<double>> row;          // cumulative over states, per tuple
    std::vector<std::vector<std::size_t>> next;   // tuple transitions
  };
  static Chain make_chain(const MarkovModel& model);
  static std::size_t draw(const std::vector<double>& cumulative, Generator& gen);
  void run_chain(std::size_t n, Generator& gen, std::vector<std::size_t>& states) const;

  enum class Kind { Iid, Chain, ChainWithContinuum, Noisy, Hidden, Sticky };
  Kind kind_ = Kind::Iid;
  std::vector<Symbol> table_;
  std::vector<double> iid_;                         // cumulative atom masses
  bool iid_has_continuum_ = false;
  Chain chain_;
  std::size_t continuum_state_ = 0;                 // for mixed Markov
  std::vector<double> noise_;                       // cumulative noise atom masses
  std::vector<std::vector<std::uint64_t>> sum_code_;  // [state][noise atom] -> code
  std::vector<std::vector<double>> emission_;       // cumulative, per hidden state
  double repeat_prob_ = 0.5;
};

/// Length-n stationary trajectory.
SequenceBlock simulate(const ProcessSpec& spec, std::size_t n, Generator& gen);
SequenceBlock simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/// Monte Carlo frequency of a continuum first symbol recurring in positions 2..n.
double repeat_mass_estimate(const ProcessSpec& spec, std::size_t horizon, std::size_t trials,
                            std::uint64_t seed, std::size_t workers = 1);

struct Compliance {
  /// Only atoms are expected to recur (the tilde reduction applies).
  bool repeatability = true;
  std::vector<std::string> warnings;
};

/// Advisory hypothesis flags for the rate theorems; never throws.
Compliance check_compliance(const ProcessSpec& spec);

/// Tail-ratio heuristic for the decay condition lim P_i i^beta = 0 on a
/// truncated, nonincreasing atom list. Returns an advisory message or "".
std::string decay_advisory(const std::vector<double>& sorted_probs, double beta = 2.0);

}  // namespace pel
