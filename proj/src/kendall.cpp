#include "tk/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tk/error.hpp"

namespace tk {

Ranking::Ranking(std::vector<std::size_t> positions) : positions_(std::move(positions)) {
  std::vector<char> seen(positions_.size(), 0);
  for (std::size_t p : positions_) {
    if (p >= positions_.size() || seen[p]) throw Error(Errc::InvalidArgument, "ranking is not a permutation");
    seen[p] = 1;
  }
}

Ranking Ranking::from_order(std::span<const std::size_t> order) {
  std::vector<std::size_t> positions(order.size(), order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= order.size()) throw Error(Errc::InvalidArgument, "ranking is not a permutation");
    positions[order[k]] = k;
  }
  return Ranking(std::move(positions));
}

PairCounts count_pairs(const Ranking& r1, const Ranking& r2) {
  if (r1.size() != r2.size()) throw Error(Errc::LengthMismatch, "rankings cover different item counts");
  const std::size_t n = r1.size();
  if (n < 2) throw Error(Errc::LengthMismatch, "rankings need at least two items");
  PairCounts out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool first = r1.position(i) < r1.position(j);
      const bool second = r2.position(i) < r2.position(j);
      (first == second ? out.concordant : out.discordant) += 1;
    }
  }
  out.pairs = std::uint64_t{n} * (n - 1) / 2;
  return out;
}

double concordant_fraction(const Ranking& r1, const Ranking& r2) {
  const PairCounts c = count_pairs(r1, r2);
  return static_cast<double>(c.concordant) / static_cast<double>(c.pairs);
}

double discordant_fraction(const Ranking& r1, const Ranking& r2) {
  const PairCounts c = count_pairs(r1, r2);
  return static_cast<double>(c.discordant) / static_cast<double>(c.pairs);
}

double kendall_tau(const Ranking& r1, const Ranking& r2) {
  const PairCounts c = count_pairs(r1, r2);
  return (static_cast<double>(c.concordant) - static_cast<double>(c.discordant)) / static_cast<double>(c.pairs);
}

Ranking ranking_from(const Dissimilarity& d, std::size_t a) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  // compare() throws on ties under TieBreak::Reject, so the order is total.
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return x != y && d.compare(a, x, y) > 0; });
  return Ranking::from_order(order);
}

std::vector<double> tau_feature_map(const Dissimilarity& d, std::size_t a) {
  const std::size_t n = d.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n * (n - 1) / 2));
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(scale * d.compare(a, i, j));
  return out;
}

KernelMatrix tau_gram(const Dissimilarity& d) {
  const std::size_t n = d.size();
  std::vector<Ranking> rankings;
  rankings.reserve(n);
  for (std::size_t a = 0; a < n; ++a) rankings.push_back(ranking_from(d, a));
  KernelMatrix k;
  k.entries = Matrix(n, n);
  k.provenance.source = "kendall-tau";
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) k.entries(a, b) = k.entries(b, a) = kendall_tau(rankings[a], rankings[b]);
  return k;
}

std::vector<double> anchored_tau_feature_map(const Dissimilarity& d, std::size_t a) {
  const std::size_t n = d.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>((n - 1) * (n - 2) / 2));
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(i == a || j == a ? 0.0 : scale * d.compare(a, i, j));
  return out;
}

KernelMatrix anchored_tau_gram(const Dissimilarity& d) {
  const std::size_t n = d.size();
  if (n < 3) throw Error(Errc::InvalidArgument, "need at least three objects");
  const std::int64_t comparisons = static_cast<std::int64_t>((n - 1) * (n - 2) / 2);
  KernelMatrix k;
  k.entries = Matrix(n, n);
  k.provenance.source = "anchored-kendall-tau";
  for (std::size_t a = 0; a < n; ++a) {
    k.entries(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == a || i == b) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (j == a || j == b) continue;
          sum += d.compare(a, i, j) * d.compare(b, i, j);
        }
      }
      k.entries(a, b) = k.entries(b, a) = static_cast<double>(sum) / static_cast<double>(comparisons);
    }
  }
  return k;
}

CountScore k2_count_score(const Dissimilarity& d, std::size_t a, std::size_t b) {
  const std::size_t n = d.size();
  CountScore s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool first = d(i, a) < d(i, j);
      const bool second = d(i, b) < d(i, j);
      (first == second ? s.agree : s.disagree) += 1;
    }
  }
  s.slots = static_cast<std::int64_t>(n * n);
  return s;
}

}  // namespace tk
