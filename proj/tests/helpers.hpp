#pragma once

#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "tk/dissimilarity.hpp"
#include "tk/error.hpp"
#include "tk/matrix.hpp"
#include "tk/triplets.hpp"

namespace testing {

// Runs f and returns the code of the tk::Error it throws.
inline tk::Errc code_of(auto&& f) {
  try {
    f();
  } catch (const tk::Error& e) {
    return e.code();
  }
  FAIL("expected tk::Error");
  return tk::Errc::InvalidArgument;
}

inline tk::Matrix to_matrix(const oracle::Dense& d) {
  tk::Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
  return m;
}

inline tk::Dissimilarity euclidean(const oracle::Points& p, tk::TieBreak ties = tk::TieBreak::Reject) {
  return tk::Dissimilarity(to_matrix(oracle::distance_matrix(p)), ties);
}

// Every comparison answered correctly, enumerated directly.
inline std::vector<tk::Triplet> all_correct(const oracle::Dense& d, bool flipped = false) {
  std::vector<tk::Triplet> out;
  const std::size_t n = d.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        if (b == a || c == a) continue;
        const bool b_closer = d[a][b] < d[a][c];
        if (b_closer != flipped) out.push_back({a, b, c});
        else out.push_back({a, c, b});
      }
  return out;
}

inline double max_abs_diff(const tk::Matrix& m, const oracle::Dense& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) worst = std::max(worst, std::abs(m(i, j) - d[i][j]));
  return worst;
}

inline double max_abs_diff(const tk::Matrix& a, const tk::Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

// Random triplet store where every object anchors and appears as a
// non-anchor at least once.
inline tk::TripletStore random_store(std::mt19937_64& gen, std::size_t n, std::size_t lines) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<tk::Triplet> t;
  for (std::size_t a = 0; a < n; ++a) {
    t.push_back({a, (a + 1) % n, (a + 2) % n});
    t.push_back({(a + 1) % n, a, (a + 2) % n});
  }
  while (t.size() < lines) {
    const std::size_t a = pick(gen), b = pick(gen), c = pick(gen);
    if (a != b && b != c && a != c) t.push_back({a, b, c});
  }
  return tk::TripletStore::ingest(t, n);
}

}  // namespace testing
