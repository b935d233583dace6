#include "pel/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pel {

namespace {

void check_total(const Rational& total, const char* what) {
  const long double gap = std::fabs(to_long_double(total) - 1.0L);
  if (gap > kMassTolerance) {
    throw std::invalid_argument(std::string(what) + " masses sum to " + format_rational(total) +
                                ", not 1");
  }
}

void check_distinct(const std::vector<Atom>& atoms, const char* what) {
  std::set<Symbol> seen;
  for (const auto& a : atoms) {
    if (!seen.insert(a.label).second) {
      throw std::invalid_argument(std::string(what) + " repeats label " + a.label.to_string());
    }
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> entries) : entries_(std::move(entries)) {
  Rational total = 0;
  for (const auto& e : entries_) {
    if (e.prob < 0) {
      throw std::invalid_argument("negative probability for " + e.label.to_string());
    }
    total += e.prob;
  }
  check_total(total, "discrete distribution");
  check_distinct(entries_, "discrete distribution");
}

Rational DiscreteDistribution::prob(const Symbol& label) const {
  for (const auto& e : entries_) {
    if (e.label == label) return e.prob;
  }
  return 0;
}

MixedDistribution::MixedDistribution(std::vector<Atom> atoms, Rational continuous_mass,
                                     std::optional<Symbol> reserved)
    : atoms_(std::move(atoms)), continuous_mass_(std::move(continuous_mass)) {
  if (continuous_mass_ < 0 || continuous_mass_ > 1) {
    throw std::invalid_argument("continuous mass outside [0,1]: " + format_rational(continuous_mass_));
  }
  Rational total = continuous_mass_;
  for (const auto& a : atoms_) {
    if (a.prob <= 0 || a.prob > 1) {
      throw std::invalid_argument("atom " + a.label.to_string() + " has probability outside (0,1]");
    }
    if (a.label.is_continuum()) {
      throw std::invalid_argument("atom labels cannot be continuum tokens");
    }
    total += a.prob;
  }
  check_total(total, "mixed distribution");
  check_distinct(atoms_, "mixed distribution");
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.prob > b.prob; });

  if (reserved) reserved_ = std::move(*reserved);
  if (has_atom(reserved_)) {
    throw std::invalid_argument("reserved label " + reserved_.to_string() + " is also an atom");
  }

  cumulative_.reserve(atoms_.size());
  long double running = 0;
  for (const auto& a : atoms_) {
    running += to_long_double(a.prob);
    cumulative_.push_back(static_cast<double>(running));
  }
}

bool MixedDistribution::has_atom(const Symbol& label) const {
  return std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return a.label == label; });
}

Rational MixedDistribution::atom_prob(const Symbol& label) const {
  for (const auto& a : atoms_) {
    if (a.label == label) return a.prob;
  }
  return 0;
}

std::vector<Symbol> MixedDistribution::atom_labels() const {
  std::vector<Symbol> labels;
  labels.reserve(atoms_.size());
  for (const auto& a : atoms_) labels.push_back(a.label);
  return labels;
}

std::size_t MixedDistribution::sample_index(Generator& gen) const {
  if (atoms_.empty()) return 0;
  const double u = gen.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = static_cast<std::size_t>(it - cumulative_.begin());
  // Rounding in the cumulative sums must not leak mass to the continuum of a
  // purely discrete law.
  if (index == atoms_.size() && continuous_mass_ == 0) return atoms_.size() - 1;
  return index;
}

Symbol MixedDistribution::sample(Generator& gen) const {
  const std::size_t index = sample_index(gen);
  if (index < atoms_.size()) return atoms_[index].label;
  return Symbol(gen.fresh_token());
}

DiscreteDistribution clump(const MixedDistribution& dist, std::span<const Symbol> keep) {
  std::set<Symbol> wanted(keep.begin(), keep.end());
  for (const auto& label : wanted) {
    if (!dist.has_atom(label)) {
      throw std::invalid_argument("clump set contains non-atom " + label.to_string());
    }
  }
  std::vector<Atom> entries;
  Rational kept = 0;
  for (const auto& a : dist.atoms()) {
    if (wanted.count(a.label)) {
      entries.push_back(a);
      kept += a.prob;
    }
  }
  const Rational rest = Rational(1) - kept;
  if (rest > 0) entries.push_back(Atom{dist.reserved_label(), rest});
  return DiscreteDistribution(std::move(entries));
}

DiscreteDistribution tilde_of(const MixedDistribution& dist) {
  const auto labels = dist.atom_labels();
  return clump(dist, labels);
}

double entropy_bits(std::span<const double> probs) {
  long double h = 0;
  for (const double p : probs) {
    if (p > 0) h -= static_cast<long double>(p) * std::log2(static_cast<long double>(p));
  }
  return static_cast<double>(h);
}

double entropy_bits(std::span<const Rational> probs) {
  long double h = 0;
  for (const auto& p : probs) {
    if (p > 0) {
      const long double q = to_long_double(p);
      h -= q * std::log2(q);
    }
  }
  return static_cast<double>(h);
}

double entropy(const DiscreteDistribution& dist) {
  std::vector<Rational> probs;
  probs.reserve(dist.size());
  for (const auto& e : dist.entries()) probs.push_back(e.prob);
  return entropy_bits(probs);
}

}  // namespace pel
