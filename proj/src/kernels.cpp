#include "tk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tk/error.hpp"

namespace tk {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Feature-major view of a column-major sparse matrix: for each distinct
// feature, the (object, value) pairs that touch it, objects ascending.
struct FeatureRows {
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> object;
  std::vector<double> value;
  std::vector<std::uint32_t> row_of;  // per stored non-zero of the input, its compact feature row
};

FeatureRows transpose(const SparseFeatureMatrix& f) {
  const std::size_t n = f.object_count();
  const std::size_t nnz = f.non_zeros();
  FeatureRows rows;
  rows.row_of.resize(nnz);

  // Compact the feature index space to the features actually used.
  std::vector<std::uint64_t> used;
  used.reserve(nnz);
  for (std::size_t c = 0; c < n; ++c)
    for (std::uint64_t idx : f.indices(c)) used.push_back(idx);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  std::size_t pos = 0;
  std::vector<std::size_t> counts(used.size() + 1, 0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::uint64_t idx : f.indices(c)) {
      const auto r = static_cast<std::uint32_t>(std::lower_bound(used.begin(), used.end(), idx) - used.begin());
      rows.row_of[pos++] = r;
      ++counts[r + 1];
    }
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  rows.start = counts;
  rows.object.resize(nnz);
  rows.value.resize(nnz);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  pos = 0;
  for (std::size_t c = 0; c < n; ++c) {
    for (double v : f.values(c)) {
      const std::uint32_t r = rows.row_of[pos++];
      rows.object[cursor[r]] = static_cast<std::uint32_t>(c);
      rows.value[cursor[r]] = v;
      ++cursor[r];
    }
  }
  return rows;
}

std::string_view feature_source(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::K1: return "k1";
    case FeatureKind::K2: return "k2";
    case FeatureKind::Custom: return "custom";
  }
  return "custom";
}

}  // namespace

std::vector<std::pair<std::string, std::string>> Provenance::key_values() const {
  return {
      {"source", source},
      {"weighted", weighted ? "true" : "false"},
      {"mu1", format_double(mu1)},
      {"mu2", format_double(mu2)},
      {"dominance_corrected", dominance_corrected ? "true" : "false"},
      {"lambda_min", format_double(lambda_min)},
  };
}

KernelMatrix gram(const SparseFeatureMatrix& features, unsigned threads) {
  const std::size_t n = features.object_count();
  const FeatureRows rows = transpose(features);
  KernelMatrix k;
  k.entries = Matrix(n, n);
  k.provenance.source = std::string(feature_source(features.kind()));

  std::vector<std::size_t> column_start(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) column_start[c + 1] = column_start[c] + features.indices(c).size();

  parallel_for(n, threads, [&](std::size_t i) {
    auto out = k.entries.row(i);
    const auto vals = features.values(i);
    for (std::size_t t = 0; t < vals.size(); ++t) {
      const double vi = vals[t];
      const std::uint32_t r = rows.row_of[column_start[i] + t];
      const auto first = rows.object.begin() + static_cast<std::ptrdiff_t>(rows.start[r]);
      const auto last = rows.object.begin() + static_cast<std::ptrdiff_t>(rows.start[r + 1]);
      // Upper triangle only: objects >= i.
      auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(i));
      for (; it != last; ++it) {
        const std::size_t pos = static_cast<std::size_t>(it - rows.object.begin());
        out[*it] += vi * rows.value[pos];
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k.entries(j, i) = k.entries(i, j);
  return k;
}

KernelMatrix combine(const KernelMatrix& a, const KernelMatrix& b, double mu1, double mu2) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "kernel matrices differ in size");
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw Error(Errc::NonPositiveWeight, "combination weights must be positive");
  KernelMatrix out;
  out.entries = Matrix(a.size(), a.size());
  auto dst = out.entries.data();
  const auto x = a.entries.data();
  const auto y = b.entries.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = mu1 * x[k] + mu2 * y[k];
  out.provenance.source =
      (a.provenance.source == "k1" && b.provenance.source == "k2") ? "k3" : a.provenance.source + "+" + b.provenance.source;
  out.provenance.weighted = a.provenance.weighted && b.provenance.weighted;
  out.provenance.mu1 = mu1;
  out.provenance.mu2 = mu2;
  return out;
}

double smallest_eigenvalue(const KernelMatrix& k) {
  if (k.size() == 0) throw Error(Errc::EmptyInput, "empty kernel matrix");
  return jacobi_eigen(k.entries, false).values.front();
}

KernelMatrix reduce_diagonal_dominance(const KernelMatrix& k) {
  double lambda = smallest_eigenvalue(k);
  if (lambda < -1e-9)
    throw Error(Errc::NotPsd, "kernel matrix has smallest eigenvalue " + format_double(lambda));
  lambda = std::max(lambda, 0.0);
  KernelMatrix out = k;
  for (std::size_t i = 0; i < out.size(); ++i) out.entries(i, i) -= lambda;
  out.provenance.dominance_corrected = true;
  out.provenance.lambda_min = lambda;
  return out;
}

bool is_psd(const KernelMatrix& k, double tolerance) {
  double scale = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) scale = std::max(scale, std::abs(k(i, i)));
  if (asymmetry(k.entries) > 1e-12 * scale) return false;
  return pivoted_cholesky(k.entries, tolerance * scale).positive_semidefinite;
}

void write_kernel(std::ostream& out, const KernelMatrix& k) {
  const std::size_t n = k.size();
  std::string line;
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j) line += ',';
      line += format_double(k(i, j));
    }
    line += '\n';
    out << line;
  }
}

void write_kernel_file(const std::filesystem::path& path, const KernelMatrix& k) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write kernel file " + path.string());
  write_kernel(out, k);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

KernelMatrix read_kernel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Parse, "kernel file is empty");
  char* end = nullptr;
  const unsigned long long n = std::strtoull(line.c_str(), &end, 10);
  if (end == line.c_str()) throw Error(Errc::Parse, "kernel file must start with the matrix size");
  KernelMatrix k;
  k.entries = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(Errc::Parse, "kernel file has fewer than n rows");
    const char* p = line.c_str();
    for (std::size_t j = 0; j < n; ++j) {
      char* next = nullptr;
      const double v = std::strtod(p, &next);
      if (next == p) throw Error(Errc::Parse, "row " + std::to_string(i + 1) + ": expected a number");
      k.entries(i, j) = v;
      p = next;
      if (j + 1 < n) {
        if (*p != ',') throw Error(Errc::Parse, "row " + std::to_string(i + 1) + ": expected ','");
        ++p;
      }
    }
    while (*p == ' ' || *p == '\r') ++p;
    if (*p != '\0') throw Error(Errc::Parse, "row " + std::to_string(i + 1) + ": too many values");
  }
  return k;
}

KernelMatrix read_kernel_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open kernel file " + path.string());
  return read_kernel(in);
}

}  // namespace tk

namespace tk {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::K1: return "k1";
    case KernelKind::K2: return "k2";
    case KernelKind::K3: return "k3";
  }
  return "k1";
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "k1") return KernelKind::K1;
  if (text == "k2") return KernelKind::K2;
  if (text == "k3") return KernelKind::K3;
  throw Error(Errc::InvalidArgument, "unknown kernel '" + std::string(text) + "' (expected k1, k2 or k3)");
}

KernelMatrix build_kernel(const TripletStore& store, const KernelSpec& spec) {
  const bool needs_resolution =
      !spec.weighted && std::any_of(store.entries().begin(), store.entries().end(),
                                    [](const TripletEntry& e) { return e.total() > 1; });
  const TripletStore resolved = needs_resolution ? resolve_majority(store) : TripletStore{};
  const TripletStore& input = needs_resolution ? resolved : store;

  KernelMatrix k;
  switch (spec.kind) {
    case KernelKind::K1:
      k = gram(build_phi_k1(input, spec.weighted), spec.threads);
      break;
    case KernelKind::K2:
      k = gram(build_phi_k2(input, spec.weighted), spec.threads);
      break;
    case KernelKind::K3:
      k = combine(gram(build_phi_k1(input, spec.weighted), spec.threads),
                  gram(build_phi_k2(input, spec.weighted), spec.threads), spec.mu1, spec.mu2);
      break;
  }
  k.provenance.weighted = spec.weighted;
  if (spec.dominance_fix) k = reduce_diagonal_dominance(k);
  return k;
}

}  // namespace tk
