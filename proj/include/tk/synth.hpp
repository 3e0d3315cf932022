#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tk/dissimilarity.hpp"
#include "tk/triplets.hpp"

namespace tk {

/// SplitMix64 generator. Every random draw in this library goes through it
/// so that runs are reproducible across platforms and standard libraries.
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform on [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

 private:
  std::uint64_t state_;
};

/// Derives an independent seed for a sub-stream (run index, grid cell, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct Dataset {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return points.size(); }
  std::size_t dimension() const noexcept { return points.empty() ? 0 : points.front().size(); }
  std::size_t class_count() const;
};

struct MixtureConfig {
  std::size_t n = 300;
  std::vector<std::vector<double>> means{{0.0, 0.0}, {5.0, 0.0}, {2.5, 4.33}};
  double stddev = 1.0;
  std::uint64_t seed = 1;
};

/// Isotropic Gaussian mixture with equal weights; each point draws its
/// component uniformly, then its coordinates.
Dataset gaussian_mixture(const MixtureConfig& config);

/// Euclidean distances with index tie-breaking.
Dissimilarity euclidean_oracle(const Dataset& data);

/// Hop counts in the Euclidean minimum spanning tree (Prim, lower index
/// wins equal edge lengths), with index tie-breaking. Throws
/// DuplicatePoints when two points coincide.
Dissimilarity mst_path_oracle(const Dataset& data);

/// Number of distinct comparisons (anchor, unordered pair): n(n-1)(n-2)/2.
std::uint64_t comparison_count(std::uint64_t n);

/// Comparison index layout: index = anchor * P + r with P = (n-1)(n-2)/2
/// and r the lexicographic rank of the pair {b < c} among the objects
/// other than the anchor.
struct Comparison {
  std::size_t anchor;
  std::size_t low;
  std::size_t high;
};
Comparison decode_comparison(std::uint64_t index, std::size_t n);

struct SamplerConfig {
  double fraction = 0.1;  ///< in (0, 1]
  double errprob = 0.0;   ///< in [0, 1]
  std::uint64_t seed = 1;
};

/// floor(fraction * total), tolerant to the binary representation of
/// decimal fractions (0.29 * 100 gives 29).
std::uint64_t sample_size(double fraction, std::uint64_t total);

/// Draws floor(fraction * total) distinct comparisons uniformly without
/// replacement (Floyd's algorithm over the implicit index space, or over
/// its complement when that is smaller), answers each with the oracle and
/// flips the answer with probability errprob. Comparisons are answered in
/// increasing index order.
TripletStore sample_triplets(const Dissimilarity& oracle, const SamplerConfig& config);

// Dataset file: header "n,m,L", then n lines "x1,...,xm,label".
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset_file(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::filesystem::path& path);

}  // namespace tk
