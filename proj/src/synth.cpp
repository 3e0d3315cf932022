#include "tk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_set>

#include "tk/error.hpp"

namespace tk {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::InvalidArgument, "empty sampling range");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer(seed ^ (0xD1B54A32D192ED03ull * (stream + 1)));
  mixer.next();
  return mixer.next();
}

std::size_t Dataset::class_count() const {
  std::size_t count = 0;
  for (std::size_t l : labels) count = std::max(count, l + 1);
  return count;
}

Dataset gaussian_mixture(const MixtureConfig& config) {
  if (config.means.empty()) throw Error(Errc::InvalidArgument, "mixture needs at least one component");
  const std::size_t dim = config.means.front().size();
  for (const auto& m : config.means)
    if (m.size() != dim || dim == 0) throw Error(Errc::DimensionMismatch, "mixture means differ in dimension");
  if (!(config.stddev >= 0.0)) throw Error(Errc::InvalidArgument, "stddev must be non-negative");

  SplitMix64 rng(config.seed);
  Dataset data;
  data.points.reserve(config.n);
  data.labels.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const std::size_t component = rng.below(config.means.size());
    std::vector<double> p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = config.means[component][k] + config.stddev * rng.normal();
    data.points.push_back(std::move(p));
    data.labels.push_back(component);
  }
  return data;
}

namespace {

Matrix euclidean_distances(const Dataset& data) {
  const std::size_t n = data.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (data.points[i].size() != data.dimension())
      throw Error(Errc::DimensionMismatch, "points differ in dimension", {i});
    for (std::size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        const double diff = data.points[i][k] - data.points[j][k];
        sum += diff * diff;
      }
      d(i, j) = d(j, i) = std::sqrt(sum);
    }
  }
  return d;
}

}  // namespace

Dissimilarity euclidean_oracle(const Dataset& data) {
  return Dissimilarity(euclidean_distances(data), TieBreak::ByIndex);
}

Dissimilarity mst_path_oracle(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 2) throw Error(Errc::InvalidArgument, "need at least two points");
  const Matrix d = euclidean_distances(data);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d(i, j) == 0.0) throw Error(Errc::DuplicatePoints, "points coincide", {i, j});

  // Prim on the complete Euclidean graph.
  std::vector<std::vector<std::size_t>> adjacent(n);
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t v = n;
    for (std::size_t u = 0; u < n; ++u)
      if (!in_tree[u] && (v == n || best[u] < best[v])) v = u;
    in_tree[v] = 1;
    if (step > 0) {
      adjacent[v].push_back(parent[v]);
      adjacent[parent[v]].push_back(v);
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (!in_tree[u] && d(v, u) < best[u]) {
        best[u] = d(v, u);
        parent[u] = v;
      }
    }
  }

  Matrix hops(n, n);
  std::vector<std::size_t> depth(n);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(depth.begin(), depth.end(), n);
    depth[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t u : adjacent[v]) {
        if (depth[u] != n) continue;
        depth[u] = depth[v] + 1;
        queue.push_back(u);
      }
    }
    for (std::size_t t = 0; t < n; ++t) hops(s, t) = static_cast<double>(depth[t]);
  }
  return Dissimilarity(std::move(hops), TieBreak::ByIndex);
}

std::uint64_t comparison_count(std::uint64_t n) {
  if (n < 3) return 0;
  return n * (n - 1) * (n - 2) / 2;
}

Comparison decode_comparison(std::uint64_t index, std::size_t n) {
  const std::uint64_t per_anchor = std::uint64_t{n - 1} * (n - 2) / 2;
  if (n < 3 || index >= per_anchor * n) throw Error(Errc::IndexOutOfRange, "comparison index out of range");
  const std::uint64_t anchor = index / per_anchor;
  const std::uint64_t r = index % per_anchor;
  const std::uint64_t m = n - 1;
  auto offset = [m](std::uint64_t i) { return i * (2 * m - i - 1) / 2; };
  const double b = static_cast<double>(2 * m - 1);
  std::uint64_t i = static_cast<std::uint64_t>(std::max(0.0, (b - std::sqrt(b * b - 8.0 * static_cast<double>(r))) / 2.0));
  if (i > m - 2) i = m - 2;
  while (i > 0 && offset(i) > r) --i;
  while (i + 1 <= m - 2 && offset(i + 1) <= r) ++i;
  const std::uint64_t j = r - offset(i) + i + 1;
  auto lift = [anchor](std::uint64_t x) { return x < anchor ? x : x + 1; };
  return {static_cast<std::size_t>(anchor), static_cast<std::size_t>(lift(i)), static_cast<std::size_t>(lift(j))};
}

std::uint64_t sample_size(double fraction, std::uint64_t total) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(Errc::InvalidArgument, "fraction must lie in (0, 1]");
  const long double product = static_cast<long double>(fraction) * static_cast<long double>(total);
  const auto m = static_cast<std::uint64_t>(std::floor(product + 1e-6L));
  return std::min(m, total);
}

namespace {

// Floyd's combination sampling: k distinct values from [0, range), sorted.
std::vector<std::uint64_t> floyd_sample(SplitMix64& rng, std::uint64_t range, std::uint64_t k) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k);
  for (std::uint64_t j = range - k; j < range; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TripletStore sample_triplets(const Dissimilarity& oracle, const SamplerConfig& config) {
  const std::size_t n = oracle.size();
  if (n < 3) throw Error(Errc::InvalidArgument, "need at least three objects");
  if (!(config.errprob >= 0.0 && config.errprob <= 1.0))
    throw Error(Errc::InvalidArgument, "errprob must lie in [0, 1]");
  const std::uint64_t total = comparison_count(n);
  const std::uint64_t m = sample_size(config.fraction, total);
  if (m == 0) throw Error(Errc::InvalidArgument, "fraction selects no comparison");

  SplitMix64 rng(config.seed);
  const bool sample_complement = m > total - m;
  const std::vector<std::uint64_t> drawn = floyd_sample(rng, total, sample_complement ? total - m : m);

  std::vector<TripletEntry> entries;
  entries.reserve(m);
  auto answer = [&](std::uint64_t index) {
    const Comparison c = decode_comparison(index, n);
    bool low_closer = oracle.compare(c.anchor, c.low, c.high) > 0;
    if (rng.uniform() < config.errprob) low_closer = !low_closer;
    TripletEntry e;
    e.anchor = static_cast<std::uint32_t>(c.anchor);
    e.low = static_cast<std::uint32_t>(c.low);
    e.high = static_cast<std::uint32_t>(c.high);
    e.low_closer = low_closer ? 1 : 0;
    e.high_closer = low_closer ? 0 : 1;
    entries.push_back(e);
  };
  if (sample_complement) {
    std::size_t skip = 0;
    for (std::uint64_t index = 0; index < total; ++index) {
      if (skip < drawn.size() && drawn[skip] == index) {
        ++skip;
        continue;
      }
      answer(index);
    }
  } else {
    for (std::uint64_t index : drawn) answer(index);
  }
  return TripletStore::from_entries(n, std::move(entries));
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.size() << ',' << data.dimension() << ',' << data.class_count() << '\n';
  char buf[64];
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    for (double x : data.points[i]) {
      std::snprintf(buf, sizeof buf, "%.17g,", x);
      line += buf;
    }
    line += std::to_string(data.labels[i]);
    line += '\n';
    out << line;
  }
}

void write_dataset_file(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write dataset file " + path.string());
  write_dataset(out, data);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (!line.empty() && line.back() == ',') parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  return v;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Parse, "dataset file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() != 3) throw Error(Errc::Parse, "dataset header must be 'n,m,L'");
  const auto n = static_cast<std::size_t>(parse_number(header[0], 1));
  const auto m = static_cast<std::size_t>(parse_number(header[1], 1));
  const auto classes = static_cast<std::size_t>(parse_number(header[2], 1));
  Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(Errc::Parse, "dataset file has fewer than n rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split_commas(line);
    if (parts.size() != m + 1) throw Error(Errc::Parse, "line " + std::to_string(i + 2) + ": expected m+1 fields");
    std::vector<double> p(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = parse_number(parts[k], i + 2);
    const double label = parse_number(parts[m], i + 2);
    if (label < 0 || label != std::floor(label) || static_cast<std::size_t>(label) >= classes)
      throw Error(Errc::Parse, "line " + std::to_string(i + 2) + ": label outside [0, L)");
    data.points.push_back(std::move(p));
    data.labels.push_back(static_cast<std::size_t>(label));
  }
  return data;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open dataset file " + path.string());
  return read_dataset(in);
}

}  // namespace tk
