#pragma once

#include <cstddef>

#include "tk/matrix.hpp"

namespace tk {

/// How equal distances d(a,b) == d(a,c) are treated by comparisons.
enum class TieBreak {
  Reject,   ///< throw TieDetected
  ByIndex,  ///< the object with the smaller index counts as closer
};

/// Symmetric dissimilarity over objects [0, n), stored densely. Used to
/// answer distance comparisons when simulating triplets and as the exact
/// reference for the Kendall-tau kernels.
class Dissimilarity {
 public:
  Dissimilarity() = default;
  /// Requires a square, exactly symmetric, non-negative matrix with zero
  /// diagonal; throws DimensionMismatch / NonSymmetric / InvalidArgument.
  Dissimilarity(Matrix distances, TieBreak ties);

  std::size_t size() const noexcept { return d_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return d_(i, j); }
  const Matrix& matrix() const noexcept { return d_; }
  TieBreak tie_break() const noexcept { return ties_; }

  /// +1 when `b` is closer to `a` than `c` is, -1 when farther. `b` or `c`
  /// may equal `a` (distance zero). Requires b != c.
  int compare(std::size_t a, std::size_t b, std::size_t c) const;

 private:
  Matrix d_;
  TieBreak ties_ = TieBreak::Reject;
};

}  // namespace tk
