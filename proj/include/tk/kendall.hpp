#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tk/dissimilarity.hpp"
#include "tk/kernels.hpp"

namespace tk {

/// Total ranking of items [0, n): position(i) is the rank of item i.
class Ranking {
 public:
  /// Throws InvalidArgument unless `positions` is a permutation of [0, n).
  explicit Ranking(std::vector<std::size_t> positions);
  /// Builds from the items listed first-to-last.
  static Ranking from_order(std::span<const std::size_t> order);

  std::size_t size() const noexcept { return positions_.size(); }
  std::size_t position(std::size_t item) const { return positions_[item]; }

 private:
  std::vector<std::size_t> positions_;
};

struct PairCounts {
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t pairs = 0;  ///< n(n-1)/2
};

/// O(n^2) pair counting. Throws LengthMismatch when sizes differ or n < 2.
PairCounts count_pairs(const Ranking& r1, const Ranking& r2);

double concordant_fraction(const Ranking& r1, const Ranking& r2);
double discordant_fraction(const Ranking& r1, const Ranking& r2);
/// Kendall's tau: concordant fraction minus discordant fraction.
double kendall_tau(const Ranking& r1, const Ranking& r2);

/// Ranking of all objects (a included, first) by distance from `a`.
Ranking ranking_from(const Dissimilarity& d, std::size_t a);

/// Kendall-tau feature vector of object a: over pairs i < j in lexicographic
/// order, (1{d(a,i)<d(a,j)} - 1{d(a,i)>d(a,j)}) / sqrt(n(n-1)/2).
std::vector<double> tau_feature_map(const Dissimilarity& d, std::size_t a);

/// G(a,b) = kendall_tau(ranking_from(a), ranking_from(b)).
KernelMatrix tau_gram(const Dissimilarity& d);

/// Kendall-tau feature vector restricted to the comparisons a similarity
/// triplet can express: pairs i < j with a not in {i, j}, scaled by
/// 1/sqrt((n-1)(n-2)/2). Entries for pairs containing `a` are zero.
std::vector<double> anchored_tau_feature_map(const Dissimilarity& d, std::size_t a);

/// Inner products of anchored_tau_feature_map vectors, evaluated by direct
/// pair counting: for a != b, sum over pairs avoiding {a, b} of the product
/// of the two comparison signs, divided by (n-1)(n-2)/2.
KernelMatrix anchored_tau_gram(const Dissimilarity& d);

/// Full-information count form of the second kernel for objects a and b:
/// over all n^2 ordered pairs (i, j), compare the booleans
/// d(i,a) < d(i,j) and d(i,b) < d(i,j); agreements minus disagreements.
struct CountScore {
  std::int64_t agree = 0;
  std::int64_t disagree = 0;
  std::int64_t slots = 0;  ///< n^2
  double value() const { return static_cast<double>(agree - disagree) / static_cast<double>(slots); }
};
CountScore k2_count_score(const Dissimilarity& d, std::size_t a, std::size_t b);

}  // namespace tk
