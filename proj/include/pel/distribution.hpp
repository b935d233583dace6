#pragma once

#include "pel/rational.hpp"
#include "pel/rng.hpp"
#include "pel/symbol.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pel {

inline constexpr double kMassTolerance = 1e-12;

struct Atom {
  Symbol label;
  Rational prob;
};

/// Finite-support distribution, e.g. the clumped law Phi_B[f].
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  /// Throws std::invalid_argument on negative mass, duplicate labels, or a
  /// total that differs from 1 by more than kMassTolerance.
  explicit DiscreteDistribution(std::vector<Atom> entries);

  const std::vector<Atom>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Probability of `label`; zero when absent.
  Rational prob(const Symbol& label) const;

 private:
  std::vector<Atom> entries_;
};

/// Single-symbol law made of point masses (the set S) plus a continuous part
/// of total mass c. Only S and c influence patterns, so the density shape is
/// not represented. Atoms are kept in nonincreasing probability order.
class MixedDistribution {
 public:
  MixedDistribution() = default;
  /// `reserved` is the x_o used by clumping; defaults to the label "x_o".
  /// Throws std::invalid_argument when masses do not sum to 1, an atom has
  /// non-positive mass, labels repeat, or `reserved` collides with an atom.
  MixedDistribution(std::vector<Atom> atoms, Rational continuous_mass,
                    std::optional<Symbol> reserved = std::nullopt);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Rational& continuous_mass() const { return continuous_mass_; }
  const Symbol& reserved_label() const { return reserved_; }

  bool has_atom(const Symbol& label) const;
  Rational atom_prob(const Symbol& label) const;
  std::vector<Symbol> atom_labels() const;
  bool is_discrete() const { return continuous_mass_ == 0; }

  /// An atom label with its probability, otherwise a fresh continuum token.
  Symbol sample(Generator& gen) const;
  /// Index into atoms() of a draw, or atoms().size() for the continuous part.
  std::size_t sample_index(Generator& gen) const;

 private:
  std::vector<Atom> atoms_;
  Rational continuous_mass_ = 0;
  Symbol reserved_ = Symbol("x_o");
  std::vector<double> cumulative_;
};

/// Keeps the atoms in `keep` and moves every other unit of mass onto the
/// reserved label. Zero-mass entries are dropped. Throws std::invalid_argument
/// if `keep` names a label that is not an atom.
DiscreteDistribution clump(const MixedDistribution& dist, std::span<const Symbol> keep);

/// clump() over the full atom set: the law of the tilde variable.
DiscreteDistribution tilde_of(const MixedDistribution& dist);

/// Shannon entropy in bits, 0 log 0 = 0.
double entropy(const DiscreteDistribution& dist);
double entropy_bits(std::span<const Rational> probs);
double entropy_bits(std::span<const double> probs);

}  // namespace pel
