#pragma once

// Independent reference computations used to check the engines. None of these
// call the pattern-law engines they are compared against.

#include "pel/distribution.hpp"
#include "pel/pattern.hpp"
#include "pel/process.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace pel::oracle {

/// Bell numbers by the Bell triangle.
std::uint64_t bell_number(std::size_t n);

/// Patterns of every sequence over an n-letter alphabet of length n.
std::set<Pattern> brute_force_patterns(std::size_t n);

/// Stationary law of a first-order chain by power iteration on the averaged
/// (lazy) kernel, in doubles.
std::vector<double> power_iteration_stationary(const MarkovModel& chain, std::size_t iterations = 100000,
                                               double tolerance = 1e-15);

/// H(X^n) in bits for a stationary finite chain of any order, enumerating every
/// sequence; the starting law comes from power iteration on the lifted chain.
double sequence_block_entropy(const MarkovModel& chain, std::size_t n);

/// Law of the pattern of n i.i.d. draws when the continuous part of `dist`
/// is replaced by K equal atoms of mass c/K. Enumerates, per pattern, every
/// assignment of label classes to original atoms or to the K-atom pool.
std::map<Pattern, long double> discretized_mixed_iid_law(const MixedDistribution& dist, std::size_t n,
                                                         std::uint64_t k);

/// Entropy of Geometric(p) on {1,2,...}: h(p)/p in bits.
double geometric_entropy(double p);

}  // namespace pel::oracle
