#include "pel/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pel {

namespace {

struct Bracketed {
  double entropy = 0;
  double factor = 0;
};

Bracketed prop4_parts(const MixedDistribution& dist, std::span<const Symbol> keep, std::size_t n) {
  if (keep.empty()) throw std::invalid_argument("Prop. 4 bound needs a nonempty atom subset");
  if (n < 1) throw std::invalid_argument("Prop. 4 bound needs n >= 1");
  long double min_prob = 1;
  for (const auto& b : keep) {
    if (!dist.has_atom(b)) throw std::invalid_argument("bound subset contains non-atom " + b.to_string());
    min_prob = std::min(min_prob, to_long_double(dist.atom_prob(b)));
  }
  Bracketed parts;
  parts.entropy = entropy(clump(dist, keep));
  parts.factor = static_cast<double>(1.0L - static_cast<long double>(keep.size()) *
                                               std::exp(-static_cast<long double>(n) * min_prob));
  return parts;
}

/// Summand of the normalization series, computed in long double.
long double series_term(std::size_t i, long double eps) {
  const long double x = static_cast<long double>(i);
  return 1.0L / (x * std::pow(std::log(x), 1.0L + eps));
}

}  // namespace

double prop4_lower_bound(const MixedDistribution& dist, std::span<const Symbol> keep, std::size_t n) {
  const auto parts = prop4_parts(dist, keep, n);
  return parts.entropy * std::max(0.0, parts.factor);
}

bool prop4_is_vacuous(const MixedDistribution& dist, std::span<const Symbol> keep, std::size_t n) {
  return prop4_parts(dist, keep, n).factor <= 0;
}

double waiting_time_entropy_bound(double d_min, double d_max) {
  if (!(d_min > 0) || !(d_min <= d_max) || !(d_max <= 1)) {
    throw std::invalid_argument("waiting-time bound needs 0 < d_min <= d_max <= 1");
  }
  if (d_max == 1) return 1.0;
  const long double lo = d_min;
  const long double hi = d_max;
  const long double first = -(hi * std::log2(lo)) / lo;
  const long double second = -hi * (1 - lo) * std::log2(1 - hi) / (lo * lo);
  return static_cast<double>(first + second);
}

double waiting_time_entropy_bound(const MixedMarkovModel& model, const Symbol& x) {
  if (std::find(model.atoms().begin(), model.atoms().end(), x) == model.atoms().end()) {
    throw std::invalid_argument("waiting-time bound: " + x.to_string() + " is not an atom");
  }
  double d_min = 1, d_max = 0;
  for (const auto& [tuple, row] : model.rows()) {
    const double p = static_cast<double>(to_long_double(row.atom_prob(x)));
    d_min = std::min(d_min, p);
    d_max = std::max(d_max, p);
  }
  return waiting_time_entropy_bound(d_min, d_max);
}

GrowthDistribution::GrowthDistribution(double eps, double precision, std::size_t max_terms) : eps_(eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("growth exponent must lie in (0,1)");
  if (!(precision > 0)) throw std::invalid_argument("precision must be positive");
  const long double e = eps;
  // Compensated partial sum of terms 2..N-1, extended by doubling N.
  long double sum = 0, carry = 0;
  std::size_t next = 2;
  std::size_t n = 1 << 10;
  for (;;) {
    for (; next < n; ++next) {
      const long double y = series_term(next, e) - carry;
      const long double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
    // Tail sum_{i>=N} f(i) lies in [I + f(N)/2, I + f(N)] for the convex,
    // decreasing summand, with I = (ln N)^{-eps} / eps.
    const long double integral = std::pow(std::log(static_cast<long double>(n)), -e) / e;
    const long double fn = series_term(n, e);
    const long double slack = sum * 64 * std::numeric_limits<long double>::epsilon();
    const long double lo = sum + integral + fn / 2 - slack;
    const long double hi = sum + integral + fn + slack;
    if (1.0L / lo - 1.0L / hi <= precision) {
      sum_lo_ = static_cast<double>(lo);
      sum_hi_ = static_cast<double>(hi);
      c_lo_ = static_cast<double>(1.0L / hi);
      c_hi_ = static_cast<double>(1.0L / lo);
      truncation_ = n;
      return;
    }
    if (n >= max_terms) {
      throw std::runtime_error("normalization enclosure did not reach the requested precision within " +
                               std::to_string(max_terms) + " terms");
    }
    n = std::min(n * 2, max_terms);
  }
}

double GrowthDistribution::prob(std::size_t i) const {
  if (i < 2) return 0.0;
  return static_cast<double>(static_cast<long double>(c()) * series_term(i, eps_));
}

std::vector<double> GrowthDistribution::partial_entropies(std::size_t max_l) const {
  std::vector<double> d(max_l + 1, 0.0);
  long double nats = 0;
  const long double ln2 = std::log(2.0L);
  const long double c = this->c();
  for (std::size_t l = 2; l <= max_l; ++l) {
    const long double p = c * series_term(l, eps_);
    nats -= p * std::log(p);
    d[l] = static_cast<double>(nats / ln2);
  }
  return d;
}

double GrowthDistribution::partial_entropy(std::size_t l) const { return partial_entropies(l).back(); }

std::vector<BoundPoint> theorem5_curve(const GrowthDistribution& dist, std::span<const std::size_t> n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("n grid must be strictly increasing");
  }
  const std::size_t n_max = n_grid.back();
  const auto d = dist.partial_entropies(std::max<std::size_t>(n_max, 2));
  const double eps = dist.epsilon();

  std::vector<BoundPoint> curve;
  std::size_t carried = 0;
  for (const auto n : n_grid) {
    std::vector<std::size_t> candidates;
    candidates.push_back(static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), (1 - eps) / (1 + eps)))));
    for (std::size_t l = 2; l <= n; l *= 2) candidates.push_back(l);
    // Brackets only grow with n, so the previous maximizer keeps the curve monotone.
    if (carried) candidates.push_back(carried);

    BoundPoint point;
    point.n = n;
    point.vacuous = true;
    double best = 0;
    for (const auto l : candidates) {
      if (l < 2 || l > n_max) continue;
      const long double bracket = 1.0L - static_cast<long double>(l) *
                                             std::exp(-static_cast<long double>(n) * dist.prob(l));
      const double value = static_cast<double>(d[l] * bracket);
      if (value > best) {
        best = value;
        point.argmax_l = l;
        point.vacuous = false;
      }
    }
    point.bound_bits = best;
    if (point.argmax_l) carried = point.argmax_l;
    curve.push_back(point);
  }
  return curve;
}

}  // namespace pel
