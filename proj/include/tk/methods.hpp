#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tk/kernels.hpp"
#include "tk/synth.hpp"

namespace tk {

struct KMeansOptions {
  std::size_t clusters = 3;
  std::size_t restarts = 10;
  std::size_t max_iter = 100;
  std::uint64_t seed = 1;
};

struct ClusteringResult {
  std::vector<std::size_t> assignment;
  std::size_t clusters = 0;
  double objective = 0.0;              ///< within-cluster feature-space sum of squares
  std::vector<double> objective_trace;  ///< per iteration, for the returned restart
  std::size_t iterations = 0;
};

/// k distinct objects drawn uniformly without replacement, in draw order.
/// Kernel k-means consumes one such draw per restart from a single
/// SplitMix64(seed) stream.
std::vector<std::size_t> draw_initial_centers(SplitMix64& rng, std::size_t n, std::size_t k);

/// Lloyd iterations in the feature space implied by K:
///   ||phi_i - mu_c||^2 = K_ii - 2 mean_{j in c} K_ij + mean_{j,l in c} K_jl.
/// Objects start at their nearest initial center (lowest cluster id on
/// ties) and only move on strict improvement. An emptied cluster is
/// re-seeded with the object farthest from its own centroid. The restart
/// with the lowest objective wins (earliest on ties). Throws NotPsd or
/// InvalidArgument (k outside [1, n]).
ClusteringResult kernel_kmeans(const KernelMatrix& k, const KMeansOptions& options);

struct PcaProjection {
  Matrix coordinates;               ///< n x p
  std::vector<double> eigenvalues;  ///< top p of the centered kernel, descending
};

/// Double-centers K, takes the top-p eigenpairs and scales eigenvectors by
/// sqrt(eigenvalue). Each component's sign is fixed so that its
/// largest-magnitude coordinate is positive. Throws NotPsd or
/// InvalidArgument (p outside [1, n]).
PcaProjection kernel_pca(const KernelMatrix& k, std::size_t components);

struct Merge {
  std::size_t left;   ///< smaller node id
  std::size_t right;  ///< larger node id
  double height;
  std::size_t node;   ///< n + merge index
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

/// Feature-space distance sqrt(K_ii + K_jj - 2 K_ij). Squared values below
/// -1e-9 (relative to the diagonal scale) throw NegativeSquaredDistance;
/// smaller negatives clamp to zero.
Matrix induced_distances(const KernelMatrix& k);

/// Agglomerative clustering with complete linkage on induced_distances.
/// Equal linkage values merge the pair with the smallest (left, right) node
/// ids first. Throws NotPsd or NegativeSquaredDistance.
Dendrogram complete_linkage(const KernelMatrix& k);

// Output formats.
void write_clustering(std::ostream& out, const ClusteringResult& result);
void write_dendrogram(std::ostream& out, const Dendrogram& tree);
void write_projection(std::ostream& out, const PcaProjection& projection);

}  // namespace tk
