#include "tk/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "tk/error.hpp"
#include "tk/parallel.hpp"

namespace tk {

PurityScore purity(std::span<const std::size_t> assignment, std::span<const std::size_t> labels) {
  if (assignment.size() != labels.size()) throw Error(Errc::LengthMismatch, "assignment and labels differ in length");
  if (assignment.empty()) throw Error(Errc::EmptyInput, "no objects to score");
  std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
  for (std::size_t i = 0; i < assignment.size(); ++i) ++table[assignment[i]][labels[i]];
  std::size_t hits = 0;
  for (const auto& [cluster, row] : table) {
    std::size_t best = 0;
    for (const auto& [label, count] : row) best = std::max(best, count);
    hits += best;
  }
  PurityScore s;
  s.value = static_cast<double>(hits) / static_cast<double>(assignment.size());
  s.clusters = table.size();
  s.objects = assignment.size();
  return s;
}

std::string_view to_string(OracleKind kind) {
  return kind == OracleKind::Euclidean ? "euclidean" : "mst";
}

OracleKind parse_oracle_kind(std::string_view text) {
  if (text == "euclidean") return OracleKind::Euclidean;
  if (text == "mst") return OracleKind::MstPath;
  throw Error(Errc::InvalidArgument, "unknown oracle '" + std::string(text) + "' (expected euclidean or mst)");
}

namespace {

struct CellOutcome {
  double purity = 0.0;
  double seconds = 0.0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// All (fraction, errprob, kernel) outcomes of one repeat, in row order.
std::vector<CellOutcome> run_repeat(const ExperimentConfig& config, std::size_t repeat) {
  const std::uint64_t run_seed = derive_seed(config.seed, repeat);
  MixtureConfig mixture = config.mixture;
  mixture.seed = run_seed;
  const Dataset data = gaussian_mixture(mixture);
  const Dissimilarity oracle =
      config.oracle == OracleKind::Euclidean ? euclidean_oracle(data) : mst_path_oracle(data);
  const std::size_t clusters = config.clusters ? config.clusters : config.mixture.means.size();

  std::vector<CellOutcome> out;
  for (std::size_t f = 0; f < config.fractions.size(); ++f) {
    for (double errprob : config.errprobs) {
      SamplerConfig sampler{config.fractions[f], errprob, derive_seed(run_seed, 1 + f)};
      const TripletStore store = sample_triplets(oracle, sampler);

      KernelSpec spec;
      spec.weighted = config.weighted;
      spec.dominance_fix = false;
      spec.threads = 1;
      std::optional<KernelMatrix> raw1, raw2;
      double t1 = 0.0, t2 = 0.0;
      auto raw = [&](KernelKind kind) -> const KernelMatrix& {
        auto& slot = kind == KernelKind::K1 ? raw1 : raw2;
        double& t = kind == KernelKind::K1 ? t1 : t2;
        if (!slot) {
          const auto start = Clock::now();
          spec.kind = kind;
          slot = build_kernel(store, spec);
          t = seconds_since(start);
        }
        return *slot;
      };

      for (std::size_t q = 0; q < config.kernels.size(); ++q) {
        const KernelKind kind = config.kernels[q];
        KernelMatrix k;
        double seconds = 0.0;
        if (kind == KernelKind::K3) {
          const KernelMatrix& a = raw(KernelKind::K1);
          const KernelMatrix& b = raw(KernelKind::K2);
          const auto start = Clock::now();
          k = combine(a, b, config.mu1, config.mu2);
          if (config.dominance_fix) k = reduce_diagonal_dominance(k);
          seconds = t1 + t2 + seconds_since(start);
        } else {
          const KernelMatrix& a = raw(kind);
          const auto start = Clock::now();
          k = config.dominance_fix ? reduce_diagonal_dominance(a) : a;
          seconds = (kind == KernelKind::K1 ? t1 : t2) + seconds_since(start);
        }
        KMeansOptions km;
        km.clusters = clusters;
        km.restarts = config.restarts;
        km.max_iter = config.max_iter;
        km.seed = derive_seed(run_seed, 1000 + q);
        const ClusteringResult result = kernel_kmeans(k, km);
        out.push_back({purity(result.assignment, data.labels).value, seconds});
      }
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Grid coordinates are user input; print them the way they were typed.
std::string grid(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.repeats == 0) throw Error(Errc::InvalidArgument, "need at least one repeat");
  if (config.fractions.empty() || config.errprobs.empty() || config.kernels.empty())
    throw Error(Errc::InvalidArgument, "experiment grid is empty");

  std::vector<std::vector<CellOutcome>> per_repeat(config.repeats);
  parallel_for(config.repeats, config.threads, [&](std::size_t r) { per_repeat[r] = run_repeat(config, r); });

  std::vector<ExperimentRow> rows;
  std::size_t cell = 0;
  for (double fraction : config.fractions) {
    for (double errprob : config.errprobs) {
      for (KernelKind kind : config.kernels) {
        ExperimentRow row;
        row.fraction = fraction;
        row.errprob = errprob;
        row.kernel = kind;
        double seconds = 0.0;
        for (const auto& outcomes : per_repeat) {
          row.purities.push_back(outcomes[cell].purity);
          seconds += outcomes[cell].seconds;
        }
        const double count = static_cast<double>(config.repeats);
        double sum = 0.0;
        for (double p : row.purities) sum += p;
        row.mean_purity = sum / count;
        double sq = 0.0;
        for (double p : row.purities) sq += (p - row.mean_purity) * (p - row.mean_purity);
        row.sd_purity = config.repeats > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0;
        row.mean_kernel_seconds = seconds / count;
        rows.push_back(std::move(row));
        ++cell;
      }
    }
  }
  return rows;
}

void write_results(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "fraction,errprob,kernel,method,repeats,mean_purity,sd_purity,min_purity,max_purity\n";
  for (const ExperimentRow& r : rows) {
    const auto [lo, hi] = std::minmax_element(r.purities.begin(), r.purities.end());
    out << grid(r.fraction) << ',' << grid(r.errprob) << ',' << to_string(r.kernel) << ",kernel-kmeans,"
        << r.purities.size() << ',' << fmt(r.mean_purity) << ',' << fmt(r.sd_purity) << ',' << fmt(*lo) << ','
        << fmt(*hi) << '\n';
  }
}

void write_timing(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "fraction,errprob,kernel,repeats,mean_kernel_seconds\n";
  for (const ExperimentRow& r : rows)
    out << grid(r.fraction) << ',' << grid(r.errprob) << ',' << to_string(r.kernel) << ',' << r.purities.size() << ','
        << fmt(r.mean_kernel_seconds) << '\n';
}

}  // namespace tk
