#include "tk/methods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "tk/error.hpp"

namespace tk {

namespace {

void require_psd(const KernelMatrix& k) {
  if (!is_psd(k))
    throw Error(Errc::NotPsd, "kernel matrix is not positive semi-definite; apply the diagonal-dominance fix");
}

// Squared feature-space distance of every object to every cluster centroid.
struct ClusterDistances {
  std::vector<double> dist;  // n x k, row-major
  double objective = 0.0;
};

ClusterDistances centroid_distances(const KernelMatrix& k, const std::vector<std::size_t>& assign,
                                    std::size_t clusters) {
  const std::size_t n = k.size();
  std::vector<double> size(clusters, 0.0);
  for (std::size_t c : assign) size[c] += 1.0;
  std::vector<double> row_sum(n * clusters, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = k.entries.row(i);
    double* out = &row_sum[i * clusters];
    for (std::size_t j = 0; j < n; ++j) out[assign[j]] += row[j];
  }
  std::vector<double> within(clusters, 0.0);
  for (std::size_t j = 0; j < n; ++j) within[assign[j]] += row_sum[j * clusters + assign[j]];

  ClusterDistances out;
  out.dist.assign(n * clusters, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < clusters; ++c) {
      if (size[c] == 0.0) continue;
      out.dist[i * clusters + c] =
          k(i, i) - 2.0 * row_sum[i * clusters + c] / size[c] + within[c] / (size[c] * size[c]);
    }
    out.objective += out.dist[i * clusters + assign[i]];
  }
  return out;
}

// Gives every empty cluster the object farthest from its current centroid,
// taken from clusters that keep at least one other member.
void repair_empty(std::vector<std::size_t>& assign, const std::vector<double>& dist, std::size_t clusters) {
  const std::size_t n = assign.size();
  std::vector<std::size_t> size(clusters, 0);
  for (std::size_t c : assign) ++size[c];
  std::vector<char> moved(n, 0);
  for (std::size_t c = 0; c < clusters; ++c) {
    if (size[c] > 0) continue;
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (moved[i] || size[assign[i]] < 2) continue;
      if (far == n || dist[i * clusters + assign[i]] > dist[far * clusters + assign[far]]) far = i;
    }
    if (far == n) throw Error(Errc::InvalidArgument, "cannot populate every cluster");
    --size[assign[far]];
    assign[far] = c;
    size[c] = 1;
    moved[far] = 1;
  }
}

ClusteringResult run_lloyd(const KernelMatrix& k, const std::vector<std::size_t>& centers, std::size_t max_iter) {
  const std::size_t n = k.size();
  const std::size_t clusters = centers.size();

  std::vector<double> seed_dist(n * clusters);
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < clusters; ++c) {
      const std::size_t m = centers[c];
      seed_dist[i * clusters + c] = k(i, i) - 2.0 * k(i, m) + k(m, m);
      if (seed_dist[i * clusters + c] < seed_dist[i * clusters + assign[i]]) assign[i] = c;
    }
  }
  repair_empty(assign, seed_dist, clusters);

  ClusteringResult result;
  result.clusters = clusters;
  for (std::size_t iter = 0;; ++iter) {
    const ClusterDistances cd = centroid_distances(k, assign, clusters);
    result.objective_trace.push_back(cd.objective);
    result.objective = cd.objective;
    result.iterations = iter;
    if (iter == max_iter) break;

    std::vector<std::size_t> next = assign;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = next[i];
      for (std::size_t c = 0; c < clusters; ++c)
        if (cd.dist[i * clusters + c] < cd.dist[i * clusters + best]) best = c;
      next[i] = best;
    }
    repair_empty(next, cd.dist, clusters);
    if (next == assign) break;
    assign = std::move(next);
  }
  result.assignment = std::move(assign);
  return result;
}

}  // namespace

std::vector<std::size_t> draw_initial_centers(SplitMix64& rng, std::size_t n, std::size_t k) {
  if (k > n) throw Error(Errc::InvalidArgument, "more centers than objects");
  std::vector<std::size_t> picked;
  picked.reserve(k);
  while (picked.size() < k) {
    const std::size_t candidate = rng.below(n);
    if (std::find(picked.begin(), picked.end(), candidate) == picked.end()) picked.push_back(candidate);
  }
  return picked;
}

ClusteringResult kernel_kmeans(const KernelMatrix& k, const KMeansOptions& options) {
  const std::size_t n = k.size();
  if (options.clusters < 2 || options.clusters > n)
    throw Error(Errc::InvalidArgument, "cluster count must lie in [2, n]");
  if (options.restarts == 0) throw Error(Errc::InvalidArgument, "need at least one restart");
  require_psd(k);

  SplitMix64 rng(options.seed);
  ClusteringResult best;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    const std::vector<std::size_t> centers = draw_initial_centers(rng, n, options.clusters);
    ClusteringResult candidate = run_lloyd(k, centers, options.max_iter);
    if (r == 0 || candidate.objective < best.objective) best = std::move(candidate);
  }
  return best;
}

PcaProjection kernel_pca(const KernelMatrix& k, std::size_t components) {
  const std::size_t n = k.size();
  if (components < 1 || components > n) throw Error(Errc::InvalidArgument, "component count must lie in [1, n]");
  require_psd(k);

  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += k(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n) * static_cast<double>(n);
  Matrix centered(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) centered(i, j) = k(i, j) - row_mean[i] - row_mean[j] + grand;
  // Round-off in the centering must not trip the symmetry check.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) centered(j, i) = centered(i, j);

  const SymmetricEigen eig = jacobi_eigen(centered, true);
  PcaProjection out;
  out.coordinates = Matrix(n, components);
  for (std::size_t c = 0; c < components; ++c) {
    const std::size_t src = n - 1 - c;
    const double lambda = std::max(eig.values[src], 0.0);
    out.eigenvalues.push_back(lambda);
    std::size_t largest = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(eig.vectors(i, src)) > std::abs(eig.vectors(largest, src))) largest = i;
    const double sign = eig.vectors(largest, src) < 0.0 ? -1.0 : 1.0;
    const double scale = sign * std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) out.coordinates(i, c) = scale * eig.vectors(i, src);
  }
  return out;
}

Matrix induced_distances(const KernelMatrix& k) {
  const std::size_t n = k.size();
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(k(i, i)));
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (sq < -1e-9 * scale)
        throw Error(Errc::NegativeSquaredDistance, "kernel entry violates the Cauchy-Schwarz bound", {i, j});
      sq = std::max(sq, 0.0);
      d(i, j) = d(j, i) = std::sqrt(sq);
    }
  }
  return d;
}

Dendrogram complete_linkage(const KernelMatrix& k) {
  const std::size_t n = k.size();
  if (n == 0) throw Error(Errc::EmptyInput, "empty kernel matrix");
  require_psd(k);
  Matrix link = induced_distances(k);

  std::vector<std::size_t> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<char> active(n, 1);
  Dendrogram tree;
  tree.leaves = n;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bs = n, bt = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      for (std::size_t t = s + 1; t < n; ++t) {
        if (!active[t]) continue;
        if (bs == n) {
          bs = s;
          bt = t;
          continue;
        }
        const double h = link(s, t);
        const double hb = link(bs, bt);
        if (h < hb) {
          bs = s;
          bt = t;
        } else if (h == hb) {
          const std::pair key{std::min(node[s], node[t]), std::max(node[s], node[t])};
          const std::pair best_key{std::min(node[bs], node[bt]), std::max(node[bs], node[bt])};
          if (key < best_key) {
            bs = s;
            bt = t;
          }
        }
      }
    }
    const std::size_t left = std::min(node[bs], node[bt]);
    const std::size_t right = std::max(node[bs], node[bt]);
    const std::size_t id = n + step;
    tree.merges.push_back({left, right, link(bs, bt), id});
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == bs || x == bt) continue;
      const double h = std::max(link(bs, x), link(bt, x));
      link(bs, x) = link(x, bs) = h;
    }
    node[bs] = id;
    active[bt] = 0;
  }
  return tree;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_clustering(std::ostream& out, const ClusteringResult& result) {
  for (std::size_t i = 0; i < result.assignment.size(); ++i) out << i << ',' << result.assignment[i] << '\n';
}

void write_dendrogram(std::ostream& out, const Dendrogram& tree) {
  for (const Merge& m : tree.merges) out << m.left << ',' << m.right << ',' << fmt(m.height) << ',' << m.node << '\n';
}

void write_projection(std::ostream& out, const PcaProjection& projection) {
  const Matrix& c = projection.coordinates;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    out << i;
    for (std::size_t k = 0; k < c.cols(); ++k) out << ',' << fmt(c(i, k));
    out << '\n';
  }
}

}  // namespace tk
