#include "tk/dissimilarity.hpp"

#include <string>

#include "tk/error.hpp"

namespace tk {

Dissimilarity::Dissimilarity(Matrix distances, TieBreak ties) : d_(std::move(distances)), ties_(ties) {
  if (d_.rows() != d_.cols()) throw Error(Errc::DimensionMismatch, "dissimilarity matrix is not square");
  for (std::size_t i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) throw Error(Errc::InvalidArgument, "dissimilarity diagonal must be zero", {i});
    for (std::size_t j = i + 1; j < d_.cols(); ++j) {
      if (d_(i, j) != d_(j, i)) throw Error(Errc::NonSymmetric, "dissimilarity is not symmetric", {i, j});
      if (!(d_(i, j) >= 0.0)) throw Error(Errc::InvalidArgument, "dissimilarity must be non-negative", {i, j});
    }
  }
}

int Dissimilarity::compare(std::size_t a, std::size_t b, std::size_t c) const {
  const double db = d_(a, b);
  const double dc = d_(a, c);
  if (db < dc) return 1;
  if (db > dc) return -1;
  if (ties_ == TieBreak::Reject)
    throw Error(Errc::TieDetected,
                "d(" + std::to_string(a) + "," + std::to_string(b) + ") == d(" + std::to_string(a) + "," +
                    std::to_string(c) + ")",
                {a, b, c});
  return b < c ? 1 : -1;
}

}  // namespace tk
