#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tk/kernels.hpp"
#include "tk/methods.hpp"
#include "tk/synth.hpp"

namespace tk {

struct PurityScore {
  double value = 0.0;
  std::size_t clusters = 0;  ///< distinct cluster ids present
  std::size_t objects = 0;
};

/// (1/n) * sum over clusters of the largest class overlap. Throws
/// LengthMismatch or EmptyInput.
PurityScore purity(std::span<const std::size_t> assignment, std::span<const std::size_t> labels);

enum class OracleKind { Euclidean, MstPath };

std::string_view to_string(OracleKind kind);
OracleKind parse_oracle_kind(std::string_view text);

struct ExperimentConfig {
  MixtureConfig mixture;
  OracleKind oracle = OracleKind::Euclidean;
  std::vector<double> fractions{0.1};
  std::vector<double> errprobs{0.0};
  std::vector<KernelKind> kernels{KernelKind::K1, KernelKind::K2, KernelKind::K3};
  double mu1 = 1.0;
  double mu2 = 1.0;
  bool weighted = false;
  bool dominance_fix = true;
  std::size_t clusters = 0;  ///< 0: number of mixture components
  std::size_t restarts = 10;
  std::size_t max_iter = 100;
  std::size_t repeats = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;  ///< repeats evaluated concurrently
};

/// One aggregated grid cell for one kernel.
struct ExperimentRow {
  double fraction = 0.0;
  double errprob = 0.0;
  KernelKind kernel = KernelKind::K1;
  std::vector<double> purities;  ///< one per repeat, in repeat order
  double mean_purity = 0.0;
  double sd_purity = 0.0;
  double mean_kernel_seconds = 0.0;  ///< feature maps + Gram + dominance fix
};

/// Seeds: repeat r draws its data set from derive_seed(seed, r); the
/// triplet sample for fraction index f uses derive_seed(run, 1 + f) and is
/// shared by every errprob of that fraction; k-means for kernel index q uses
/// derive_seed(run, 1000 + q). Rows are ordered fraction, errprob, kernel.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

/// Deterministic purity table:
/// "fraction,errprob,kernel,method,repeats,mean_purity,sd_purity,min_purity,max_purity".
void write_results(std::ostream& out, const std::vector<ExperimentRow>& rows);
/// Wall-clock table: "fraction,errprob,kernel,repeats,mean_kernel_seconds".
void write_timing(std::ostream& out, const std::vector<ExperimentRow>& rows);

}  // namespace tk
