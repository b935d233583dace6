#pragma once

#include "pel/distribution.hpp"
#include "pel/process.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pel {

/// H(Phi_B[f]) * max(0, 1 - |B| exp(-n min_{b in B} p_b)), in bits. Throws
/// std::invalid_argument when B is empty or names a non-atom, or n < 1.
double prop4_lower_bound(const MixedDistribution& dist, std::span<const Symbol> keep, std::size_t n);

/// Whether the bracket in prop4_lower_bound is non-positive (the bound is vacuous).
bool prop4_is_vacuous(const MixedDistribution& dist, std::span<const Symbol> keep, std::size_t n);

/// Upper bound on the entropy (bits) of a waiting time whose per-step hit
/// probability always lies in [d_min, d_max]. Returns 1 when d_max = 1.
/// Throws std::invalid_argument unless 0 < d_min <= d_max <= 1.
double waiting_time_entropy_bound(double d_min, double d_max);

/// Extracts d_min and d_max for atom `x` from the rows of a mixed Markov
/// chain and evaluates waiting_time_entropy_bound.
double waiting_time_entropy_bound(const MixedMarkovModel& model, const Symbol& x);

/// Heavy-tailed law p_1 = 0, p_i = c / (i (ln i)^{1+eps}) for i >= 2, with the
/// normalization enclosed in [c_lo, c_hi].
class GrowthDistribution {
 public:
  /// Throws std::invalid_argument unless 0 < eps < 1, and std::runtime_error
  /// when the enclosure width cannot reach `precision` within the term cap.
  explicit GrowthDistribution(double eps, double precision = 1e-9,
                              std::size_t max_terms = std::size_t{1} << 28);

  double epsilon() const { return eps_; }
  double c() const { return 0.5 * (c_lo_ + c_hi_); }
  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }
  /// Index N at which the partial sum was truncated.
  std::size_t truncation() const { return truncation_; }
  /// Enclosure [lo, hi] of sum_{i>=2} 1/(i (ln i)^{1+eps}).
  double tail_sum_lo() const { return sum_lo_; }
  double tail_sum_hi() const { return sum_hi_; }

  /// p_i using the midpoint normalization.
  double prob(std::size_t i) const;

  /// D_l = sum_{i<=l} p_i log2(1/p_i) for l = 0..max_l (index l).
  std::vector<double> partial_entropies(std::size_t max_l) const;
  /// D_l for a single l.
  double partial_entropy(std::size_t l) const;

 private:
  double eps_;
  double c_lo_ = 0;
  double c_hi_ = 0;
  double sum_lo_ = 0;
  double sum_hi_ = 0;
  std::size_t truncation_ = 0;
};

struct BoundPoint {
  std::size_t n = 0;
  double bound_bits = 0;
  std::size_t argmax_l = 0;
  bool vacuous = false;
};

/// For each n, max over l of D_l (1 - l exp(-n p_l)), searched over l_n =
/// floor(n^{(1-eps)/(1+eps)}) and l = 2^k <= n; negative values clip to 0.
/// Throws std::invalid_argument when n_grid is empty or not increasing.
std::vector<BoundPoint> theorem5_curve(const GrowthDistribution& dist, std::span<const std::size_t> n_grid);

}  // namespace pel
