#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tk/feature_maps.hpp"
#include "tk/matrix.hpp"
#include "tk/parallel.hpp"

namespace tk {

/// Where a kernel matrix came from and which corrections were applied.
struct Provenance {
  std::string source = "external";  ///< k1, k2, k3, kendall-tau, ...
  bool weighted = false;
  double mu1 = 0.0;  ///< combination weights; meaningful for k3 only
  double mu2 = 0.0;
  bool dominance_corrected = false;
  double lambda_min = 0.0;  ///< value subtracted from the diagonal

  std::vector<std::pair<std::string, std::string>> key_values() const;
};

/// Dense symmetric n x n Gram matrix.
struct KernelMatrix {
  Matrix entries;
  Provenance provenance;

  std::size_t size() const noexcept { return entries.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

/// K = Phi^T Phi. Row i of the result is accumulated from column i's
/// features in increasing feature order, so the output is bit-identical for
/// any thread count and exactly symmetric.
KernelMatrix gram(const SparseFeatureMatrix& features, unsigned threads = default_thread_count());

/// mu1 * a + mu2 * b. Throws DimensionMismatch or NonPositiveWeight.
KernelMatrix combine(const KernelMatrix& a, const KernelMatrix& b, double mu1, double mu2);

/// Smallest eigenvalue via cyclic Jacobi. Throws NonSymmetric.
double smallest_eigenvalue(const KernelMatrix& k);

/// K - lambda_min I. A lambda_min below -1e-9 throws NotPsd; values in
/// [-1e-9, 0) are treated as zero.
KernelMatrix reduce_diagonal_dominance(const KernelMatrix& k);

/// PSD test by pivoted Cholesky with tolerance scaled by the largest
/// diagonal entry (at least 1).
bool is_psd(const KernelMatrix& k, double tolerance = 1e-9);

// File format: first line "n", then n lines of n comma-separated values
// printed with 17 significant digits.
void write_kernel(std::ostream& out, const KernelMatrix& k);
void write_kernel_file(const std::filesystem::path& path, const KernelMatrix& k);
KernelMatrix read_kernel(std::istream& in);
KernelMatrix read_kernel_file(const std::filesystem::path& path);

}  // namespace tk

namespace tk {

enum class KernelKind { K1, K2, K3 };

std::string_view to_string(KernelKind kind);
/// Parses "k1", "k2" or "k3"; throws InvalidArgument otherwise.
KernelKind parse_kernel_kind(std::string_view text);

/// Everything needed to turn a triplet store into a kernel matrix.
struct KernelSpec {
  KernelKind kind = KernelKind::K1;
  double mu1 = 1.0;  ///< k3 only
  double mu2 = 1.0;  ///< k3 only
  bool weighted = false;
  bool dominance_fix = true;
  unsigned threads = default_thread_count();
};

/// Feature maps, Gram matrix, optional combination and diagonal-dominance
/// fix. Unweighted kernels first reduce contradicting or repeated triples
/// by majority decision.
KernelMatrix build_kernel(const TripletStore& store, const KernelSpec& spec);

}  // namespace tk
