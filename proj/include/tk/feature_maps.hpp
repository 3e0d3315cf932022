#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "tk/triplets.hpp"

namespace tk {

enum class FeatureKind {
  K1,      ///< indexed by unordered pairs i < j; dimension n(n-1)/2
  K2,      ///< indexed by ordered pairs i != j; dimension n(n-1)
  Custom,  ///< caller-assembled features
};

/// Rank of the unordered pair {i, j} (i < j) in lexicographic order over n
/// objects: (0,1), (0,2), ..., (0,n-1), (1,2), ...
constexpr std::uint64_t pair_index(std::uint64_t i, std::uint64_t j, std::uint64_t n) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Rank of the ordered pair (i, j), i != j: row-major with the diagonal
/// skipped, i.e. i * (n-1) + (j < i ? j : j-1).
constexpr std::uint64_t ordered_pair_index(std::uint64_t i, std::uint64_t j, std::uint64_t n) {
  return i * (n - 1) + (j < i ? j : j - 1);
}

/// Column-per-object sparse matrix (compressed sparse columns). Feature
/// indices within a column are strictly increasing.
class SparseFeatureMatrix {
 public:
  using Column = std::vector<std::pair<std::uint64_t, double>>;

  SparseFeatureMatrix() = default;
  /// Validates index ranges and sorts each column; duplicate indices within
  /// a column throw InvalidArgument.
  SparseFeatureMatrix(FeatureKind kind, std::size_t n, std::uint64_t dim, std::vector<Column> columns);

  /// Adopts compressed storage directly: start has n+1 offsets, indices
  /// strictly increasing within each column and below dim.
  static SparseFeatureMatrix from_compressed(FeatureKind kind, std::size_t n, std::uint64_t dim,
                                             std::vector<std::size_t> start, std::vector<std::uint64_t> indices,
                                             std::vector<double> values);

  FeatureKind kind() const noexcept { return kind_; }
  std::size_t object_count() const noexcept { return n_; }
  std::uint64_t dimension() const noexcept { return dim_; }
  std::size_t non_zeros() const noexcept { return values_.size(); }

  std::span<const std::uint64_t> indices(std::size_t column) const {
    return {indices_.data() + start_[column], start_[column + 1] - start_[column]};
  }
  std::span<const double> values(std::size_t column) const {
    return {values_.data() + start_[column], start_[column + 1] - start_[column]};
  }

  double column_norm(std::size_t column) const;

  friend bool operator==(const SparseFeatureMatrix&, const SparseFeatureMatrix&) = default;

 private:
  friend SparseFeatureMatrix negate(const SparseFeatureMatrix&);

  FeatureKind kind_ = FeatureKind::Custom;
  std::size_t n_ = 0;
  std::uint64_t dim_ = 0;
  std::vector<std::size_t> start_{0};
  std::vector<std::uint64_t> indices_;
  std::vector<double> values_;
};

/// Anchor-side feature map. Column a holds, for each compared pair i < j
/// with anchor a, +1 if (a,i,j) was reported and -1 if (a,j,i) was.
///
/// Unweighted: requires a contradiction-free store (ContradictionPresent
/// otherwise); the store is read as a set, so repeated triples count once,
/// and each column is scaled by 1/sqrt(number of its comparisons).
/// Weighted: entry = (#(a,i,j) - #(a,j,i)) / (#(a,i,j) + #(a,j,i)), then
/// the column is divided by its Euclidean norm.
///
/// Throws MissingAnchor listing objects that never anchor (or whose
/// weighted column vanishes because every comparison is tied).
SparseFeatureMatrix build_phi_k1(const TripletStore& store, bool weighted);

/// Non-anchor-side feature map. Column a holds, at ordered pair (i, j),
/// +1 if (i,a,j) was reported and -1 if (i,j,a) was, with the same
/// scaling/weighting rules as build_phi_k1. Throws MissingNonAnchor or
/// ContradictionPresent.
SparseFeatureMatrix build_phi_k2(const TripletStore& store, bool weighted);

/// Flips the sign of every stored value.
SparseFeatureMatrix negate(const SparseFeatureMatrix& features);

/// Dump format: header "kind,n,dim", then "col,featidx,value" per non-zero.
void write_feature_dump(std::ostream& out, const SparseFeatureMatrix& features);
void write_feature_dump_file(const std::filesystem::path& path, const SparseFeatureMatrix& features);

}  // namespace tk
