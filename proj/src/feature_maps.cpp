#include "tk/feature_maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "tk/error.hpp"

namespace tk {

SparseFeatureMatrix::SparseFeatureMatrix(FeatureKind kind, std::size_t n, std::uint64_t dim,
                                         std::vector<Column> columns)
    : kind_(kind), n_(n), dim_(dim) {
  if (columns.size() != n) throw Error(Errc::DimensionMismatch, "expected one column per object");
  start_.assign(1, 0);
  for (std::size_t c = 0; c < n; ++c) {
    Column& col = columns[c];
    std::sort(col.begin(), col.end());
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (col[k].first >= dim) throw Error(Errc::IndexOutOfRange, "feature index beyond dimension", {c});
      if (k > 0 && col[k].first == col[k - 1].first)
        throw Error(Errc::InvalidArgument, "duplicate feature index in column", {c});
      indices_.push_back(col[k].first);
      values_.push_back(col[k].second);
    }
    start_.push_back(indices_.size());
  }
}

SparseFeatureMatrix SparseFeatureMatrix::from_compressed(FeatureKind kind, std::size_t n, std::uint64_t dim,
                                                         std::vector<std::size_t> start,
                                                         std::vector<std::uint64_t> indices,
                                                         std::vector<double> values) {
  if (start.size() != n + 1 || start.front() != 0 || start.back() != indices.size() ||
      indices.size() != values.size())
    throw Error(Errc::DimensionMismatch, "inconsistent compressed column layout");
  for (std::size_t c = 0; c < n; ++c) {
    if (start[c] > start[c + 1]) throw Error(Errc::InvalidArgument, "column offsets must be non-decreasing");
    for (std::size_t k = start[c]; k < start[c + 1]; ++k) {
      if (indices[k] >= dim) throw Error(Errc::IndexOutOfRange, "feature index beyond dimension", {c});
      if (k > start[c] && indices[k] <= indices[k - 1])
        throw Error(Errc::InvalidArgument, "feature indices must increase within a column", {c});
    }
  }
  SparseFeatureMatrix m;
  m.kind_ = kind;
  m.n_ = n;
  m.dim_ = dim;
  m.start_ = std::move(start);
  m.indices_ = std::move(indices);
  m.values_ = std::move(values);
  return m;
}

double SparseFeatureMatrix::column_norm(std::size_t column) const {
  double sum = 0.0;
  for (double v : values(column)) sum += v * v;
  return std::sqrt(sum);
}

namespace {

struct Tally {
  std::uint32_t plus = 0;
  std::uint32_t minus = 0;
};

// Turns per-slot (plus, minus) tallies of one column into final values.
// Returns false when the column has no non-zero entry left.
bool finish_column(std::span<const Tally> tallies, std::span<double> values, bool weighted) {
  if (!weighted) {
    if (tallies.empty()) return false;
    const double scale = 1.0 / std::sqrt(static_cast<double>(tallies.size()));
    for (std::size_t k = 0; k < tallies.size(); ++k) values[k] = tallies[k].plus > 0 ? scale : -scale;
    return true;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < tallies.size(); ++k) {
    const double p = tallies[k].plus;
    const double m = tallies[k].minus;
    values[k] = (p - m) / (p + m);
    sum += values[k] * values[k];
  }
  if (sum == 0.0) return false;
  const double norm = std::sqrt(sum);
  for (double& v : values) v /= norm;
  return true;
}

void require_consistent(const TripletStore& store) {
  for (const TripletEntry& e : store.entries())
    if (e.contradicting())
      throw Error(Errc::ContradictionPresent,
                  "store holds both orientations of a comparison; resolve it or use weighted features",
                  {e.anchor, e.low, e.high});
}

// Removes slots whose weighted value is exactly zero (tied counts) so that
// only true non-zeros are stored.
void drop_zero_slots(std::vector<std::size_t>& start, std::vector<std::uint64_t>& indices,
                     std::vector<double>& values) {
  std::size_t write = 0;
  std::size_t read_begin = 0;
  for (std::size_t c = 0; c + 1 < start.size(); ++c) {
    const std::size_t read_end = start[c + 1];
    for (std::size_t k = read_begin; k < read_end; ++k) {
      if (values[k] == 0.0) continue;
      indices[write] = indices[k];
      values[write] = values[k];
      ++write;
    }
    read_begin = read_end;
    start[c + 1] = write;
  }
  indices.resize(write);
  values.resize(write);
}

}  // namespace

SparseFeatureMatrix build_phi_k1(const TripletStore& store, bool weighted) {
  const std::size_t n = store.object_count();
  const CoverageReport cov = coverage(store);
  if (auto missing = cov.missing_anchor(); !missing.empty())
    throw Error(Errc::MissingAnchor, std::to_string(missing.size()) + " object(s) never act as anchor",
                missing);
  if (!weighted) require_consistent(store);

  const auto entries = store.entries();
  std::vector<std::size_t> start(n + 1, 0);
  for (const TripletEntry& e : entries) ++start[e.anchor + 1];
  for (std::size_t c = 0; c < n; ++c) start[c + 1] += start[c];

  std::vector<std::uint64_t> indices(entries.size());
  std::vector<double> values(entries.size());
  std::vector<Tally> tallies(entries.size());
  // Entries are sorted by (anchor, low, high), so each column is a
  // contiguous run already in increasing pair order.
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const TripletEntry& e = entries[k];
    indices[k] = pair_index(e.low, e.high, n);
    tallies[k] = {e.low_closer, e.high_closer};
  }

  std::vector<char> dead(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t b = start[c];
    const std::size_t len = start[c + 1] - b;
    if (!finish_column({tallies.data() + b, len}, {values.data() + b, len}, weighted)) dead[c] = 1;
  }
  std::vector<std::size_t> degenerate;
  for (std::size_t c = 0; c < n; ++c)
    if (dead[c]) degenerate.push_back(c);
  if (!degenerate.empty())
    throw Error(Errc::MissingAnchor, "anchor comparisons of some objects are all tied", std::move(degenerate));

  if (weighted) drop_zero_slots(start, indices, values);
  return SparseFeatureMatrix::from_compressed(FeatureKind::K1, n, std::uint64_t{n} * (n - 1) / 2, std::move(start),
                                              std::move(indices), std::move(values));
}

SparseFeatureMatrix build_phi_k2(const TripletStore& store, bool weighted) {
  const std::size_t n = store.object_count();
  const CoverageReport cov = coverage(store);
  if (auto missing = cov.missing_non_anchor(); !missing.empty())
    throw Error(Errc::MissingNonAnchor,
                std::to_string(missing.size()) + " object(s) never appear outside the anchor position",
                missing);
  if (!weighted) require_consistent(store);

  const auto entries = store.entries();
  std::vector<std::size_t> start(n + 1, 0);
  for (const TripletEntry& e : entries) {
    ++start[e.low + 1];
    ++start[e.high + 1];
  }
  for (std::size_t c = 0; c < n; ++c) start[c + 1] += start[c];

  const std::size_t nnz = start[n];
  std::vector<std::uint64_t> indices(nnz);
  std::vector<double> values(nnz);
  std::vector<Tally> tallies(nnz);
  std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
  // Entry (i, {lo, hi}): column lo sits at slot (i, hi), gaining #(i,lo,hi)
  // and losing #(i,hi,lo); column hi mirrors that at slot (i, lo). Walking
  // entries in (anchor, low, high) order fills every column in increasing
  // slot order.
  for (const TripletEntry& e : entries) {
    std::size_t& at_low = cursor[e.low];
    indices[at_low] = ordered_pair_index(e.anchor, e.high, n);
    tallies[at_low] = {e.low_closer, e.high_closer};
    ++at_low;
    std::size_t& at_high = cursor[e.high];
    indices[at_high] = ordered_pair_index(e.anchor, e.low, n);
    tallies[at_high] = {e.high_closer, e.low_closer};
    ++at_high;
  }

  std::vector<char> dead(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t b = start[c];
    const std::size_t len = start[c + 1] - b;
    if (!finish_column({tallies.data() + b, len}, {values.data() + b, len}, weighted)) dead[c] = 1;
  }
  std::vector<std::size_t> degenerate;
  for (std::size_t c = 0; c < n; ++c)
    if (dead[c]) degenerate.push_back(c);
  if (!degenerate.empty())
    throw Error(Errc::MissingNonAnchor, "non-anchor comparisons of some objects are all tied",
                std::move(degenerate));

  if (weighted) drop_zero_slots(start, indices, values);
  return SparseFeatureMatrix::from_compressed(FeatureKind::K2, n, std::uint64_t{n} * (n - 1), std::move(start),
                                              std::move(indices), std::move(values));
}

SparseFeatureMatrix negate(const SparseFeatureMatrix& features) {
  SparseFeatureMatrix out = features;
  for (double& v : out.values_) v = -v;
  return out;
}

namespace {

std::string_view kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::K1: return "k1";
    case FeatureKind::K2: return "k2";
    case FeatureKind::Custom: return "custom";
  }
  return "custom";
}

}  // namespace

void write_feature_dump(std::ostream& out, const SparseFeatureMatrix& features) {
  out << kind_name(features.kind()) << ',' << features.object_count() << ',' << features.dimension() << '\n';
  char buf[64];
  for (std::size_t c = 0; c < features.object_count(); ++c) {
    const auto idx = features.indices(c);
    const auto val = features.values(c);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", val[k]);
      out << c << ',' << idx[k] << ',' << buf << '\n';
    }
  }
}

void write_feature_dump_file(const std::filesystem::path& path, const SparseFeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write feature dump " + path.string());
  write_feature_dump(out, features);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace tk
