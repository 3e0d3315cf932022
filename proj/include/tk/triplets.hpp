#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tk {

/// Answer to "d(anchor, closer) < d(anchor, farther)?" that came back yes.
struct Triplet {
  std::size_t anchor = 0;
  std::size_t closer = 0;
  std::size_t farther = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// One comparison slot: an anchor and an unordered pair {low < high}, with
/// how often each orientation was reported.
///   low_closer  = #(anchor, low, high)
///   high_closer = #(anchor, high, low)
struct TripletEntry {
  std::uint32_t anchor = 0;
  std::uint32_t low = 0;
  std::uint32_t high = 0;
  std::uint32_t low_closer = 0;
  std::uint32_t high_closer = 0;

  bool contradicting() const noexcept { return low_closer > 0 && high_closer > 0; }
  std::uint64_t total() const noexcept { return std::uint64_t{low_closer} + high_closer; }

  friend bool operator==(const TripletEntry&, const TripletEntry&) = default;
};

/// Immutable multiset of similarity triplets over objects [0, n), grouped by
/// comparison slot and sorted by (anchor, low, high).
class TripletStore {
 public:
  TripletStore() = default;

  /// Accumulates raw triples; duplicates increase multiplicity. Throws
  /// EmptyInput, IndexOutOfRange or DegenerateTriple.
  static TripletStore ingest(std::span<const Triplet> lines, std::size_t n);

  /// Builds a store from slot entries (any order; equal slots are merged).
  /// Entries with zero total multiplicity are dropped.
  static TripletStore from_entries(std::size_t n, std::vector<TripletEntry> entries);

  std::size_t object_count() const noexcept { return n_; }
  std::span<const TripletEntry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Sum of all multiplicities.
  std::uint64_t total() const noexcept { return total_; }

  /// #(anchor, closer, farther) in the multiset.
  std::uint64_t count(std::size_t anchor, std::size_t closer, std::size_t farther) const;

  bool has_contradictions() const noexcept;

  /// Expands back into individual triples, one per unit of multiplicity.
  std::vector<Triplet> triplets() const;

  friend bool operator==(const TripletStore&, const TripletStore&) = default;

 private:
  std::size_t n_ = 0;
  std::uint64_t total_ = 0;
  std::vector<TripletEntry> entries_;
};

/// Majority decision per comparison slot: the strictly more frequent
/// orientation survives with multiplicity one; tied slots are removed.
TripletStore resolve_majority(const TripletStore& store);

/// Occurrence counts per object, weighted by multiplicity.
struct CoverageReport {
  std::vector<std::uint64_t> anchor_counts;
  std::vector<std::uint64_t> non_anchor_counts;

  /// Objects that never act as anchor.
  std::vector<std::size_t> missing_anchor() const;
  /// Objects that never appear in the closer/farther positions.
  std::vector<std::size_t> missing_non_anchor() const;
};

CoverageReport coverage(const TripletStore& store);

// Text format: one "a,b,c" per line, '#' starts a comment line.

std::vector<Triplet> parse_triplets(std::istream& in);
std::vector<Triplet> read_triplet_file(const std::filesystem::path& path);

void write_triplets(std::ostream& out, const TripletStore& store);
void write_triplet_file(const std::filesystem::path& path, const TripletStore& store);

/// Reads a triplet file and ingests it. When `n` is absent the object count
/// is one more than the largest index present.
TripletStore load_triplet_store(const std::filesystem::path& path, std::optional<std::size_t> n = std::nullopt);

}  // namespace tk
