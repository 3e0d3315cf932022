#include "tk/triplets.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "tk/error.hpp"

namespace tk {

namespace {

bool slot_less(const TripletEntry& x, const TripletEntry& y) {
  if (x.anchor != y.anchor) return x.anchor < y.anchor;
  if (x.low != y.low) return x.low < y.low;
  return x.high < y.high;
}

bool same_slot(const TripletEntry& x, const TripletEntry& y) {
  return x.anchor == y.anchor && x.low == y.low && x.high == y.high;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

TripletStore TripletStore::ingest(std::span<const Triplet> lines, std::size_t n) {
  if (lines.empty()) throw Error(Errc::EmptyInput, "no triplets given");
  if (n > UINT32_MAX) throw Error(Errc::InvalidArgument, "object count exceeds 32-bit index range");
  std::vector<TripletEntry> entries;
  entries.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const Triplet& t = lines[k];
    if (t.anchor >= n || t.closer >= n || t.farther >= n) {
      std::vector<std::size_t> bad;
      for (std::size_t v : {t.anchor, t.closer, t.farther})
        if (v >= n) bad.push_back(v);
      throw Error(Errc::IndexOutOfRange,
                  "triplet " + std::to_string(k) + " has an index outside [0," + std::to_string(n) + ")", bad);
    }
    if (t.anchor == t.closer || t.anchor == t.farther || t.closer == t.farther)
      throw Error(Errc::DegenerateTriple, "triplet " + std::to_string(k) + " repeats an object",
                  {t.anchor, t.closer, t.farther});
    TripletEntry e;
    e.anchor = static_cast<std::uint32_t>(t.anchor);
    e.low = static_cast<std::uint32_t>(std::min(t.closer, t.farther));
    e.high = static_cast<std::uint32_t>(std::max(t.closer, t.farther));
    (t.closer < t.farther ? e.low_closer : e.high_closer) = 1;
    entries.push_back(e);
  }
  return from_entries(n, std::move(entries));
}

TripletStore TripletStore::from_entries(std::size_t n, std::vector<TripletEntry> entries) {
  if (!std::is_sorted(entries.begin(), entries.end(), slot_less))
    std::stable_sort(entries.begin(), entries.end(), slot_less);
  TripletStore store;
  store.n_ = n;
  store.entries_.reserve(entries.size());
  for (const TripletEntry& e : entries) {
    if (e.anchor >= n || e.low >= n || e.high >= n)
      throw Error(Errc::IndexOutOfRange, "entry index outside object range", {e.anchor, e.low, e.high});
    if (e.anchor == e.low || e.anchor == e.high || e.low >= e.high)
      throw Error(Errc::DegenerateTriple, "entry does not name three distinct objects", {e.anchor, e.low, e.high});
    if (e.total() == 0) continue;
    if (!store.entries_.empty() && same_slot(store.entries_.back(), e)) {
      store.entries_.back().low_closer += e.low_closer;
      store.entries_.back().high_closer += e.high_closer;
    } else {
      store.entries_.push_back(e);
    }
    store.total_ += e.total();
  }
  return store;
}

std::uint64_t TripletStore::count(std::size_t anchor, std::size_t closer, std::size_t farther) const {
  if (closer == farther) return 0;
  TripletEntry key;
  key.anchor = static_cast<std::uint32_t>(anchor);
  key.low = static_cast<std::uint32_t>(std::min(closer, farther));
  key.high = static_cast<std::uint32_t>(std::max(closer, farther));
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key, slot_less);
  if (it == entries_.end() || !same_slot(*it, key)) return 0;
  return closer < farther ? it->low_closer : it->high_closer;
}

bool TripletStore::has_contradictions() const noexcept {
  return std::any_of(entries_.begin(), entries_.end(), [](const TripletEntry& e) { return e.contradicting(); });
}

std::vector<Triplet> TripletStore::triplets() const {
  std::vector<Triplet> out;
  out.reserve(total_);
  for (const TripletEntry& e : entries_) {
    for (std::uint32_t k = 0; k < e.low_closer; ++k) out.push_back({e.anchor, e.low, e.high});
    for (std::uint32_t k = 0; k < e.high_closer; ++k) out.push_back({e.anchor, e.high, e.low});
  }
  return out;
}

TripletStore resolve_majority(const TripletStore& store) {
  std::vector<TripletEntry> kept;
  kept.reserve(store.entries().size());
  for (TripletEntry e : store.entries()) {
    if (e.low_closer == e.high_closer) continue;
    const bool low_wins = e.low_closer > e.high_closer;
    e.low_closer = low_wins ? 1 : 0;
    e.high_closer = low_wins ? 0 : 1;
    kept.push_back(e);
  }
  return TripletStore::from_entries(store.object_count(), std::move(kept));
}

std::vector<std::size_t> CoverageReport::missing_anchor() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < anchor_counts.size(); ++i)
    if (anchor_counts[i] == 0) out.push_back(i);
  return out;
}

std::vector<std::size_t> CoverageReport::missing_non_anchor() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < non_anchor_counts.size(); ++i)
    if (non_anchor_counts[i] == 0) out.push_back(i);
  return out;
}

CoverageReport coverage(const TripletStore& store) {
  CoverageReport report;
  report.anchor_counts.assign(store.object_count(), 0);
  report.non_anchor_counts.assign(store.object_count(), 0);
  for (const TripletEntry& e : store.entries()) {
    const std::uint64_t m = e.total();
    report.anchor_counts[e.anchor] += m;
    report.non_anchor_counts[e.low] += m;
    report.non_anchor_counts[e.high] += m;
  }
  return report;
}

std::vector<Triplet> parse_triplets(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Triplet> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::size_t values[3];
    const char* p = line.data();
    const char* const last = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      while (p < last && *p == ' ') ++p;
      auto [next, ec] = std::from_chars(p, last, values[k]);
      if (ec != std::errc()) throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected an index");
      p = next;
      while (p < last && *p == ' ') ++p;
      if (k < 2) {
        if (p == last || *p != ',')
          throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": expected 'a,b,c'");
        ++p;
      }
    }
    if (p != last) throw Error(Errc::Parse, "line " + std::to_string(line_no) + ": trailing characters");
    out.push_back({values[0], values[1], values[2]});
  }
  return out;
}

std::vector<Triplet> read_triplet_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open triplet file " + path.string());
  return parse_triplets(in);
}

void write_triplets(std::ostream& out, const TripletStore& store) {
  std::string buffer;
  for (const TripletEntry& e : store.entries()) {
    const std::string lo_first =
        std::to_string(e.anchor) + ',' + std::to_string(e.low) + ',' + std::to_string(e.high) + '\n';
    const std::string hi_first =
        std::to_string(e.anchor) + ',' + std::to_string(e.high) + ',' + std::to_string(e.low) + '\n';
    for (std::uint32_t k = 0; k < e.low_closer; ++k) buffer += lo_first;
    for (std::uint32_t k = 0; k < e.high_closer; ++k) buffer += hi_first;
    if (buffer.size() > (1u << 20)) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
}

void write_triplet_file(const std::filesystem::path& path, const TripletStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write triplet file " + path.string());
  write_triplets(out, store);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

TripletStore load_triplet_store(const std::filesystem::path& path, std::optional<std::size_t> n) {
  const std::vector<Triplet> lines = read_triplet_file(path);
  std::size_t count = 0;
  if (n) {
    count = *n;
  } else {
    for (const Triplet& t : lines) count = std::max({count, t.anchor + 1, t.closer + 1, t.farther + 1});
  }
  return TripletStore::ingest(lines, count);
}

}  // namespace tk
