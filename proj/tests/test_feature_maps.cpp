#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "tk/feature_maps.hpp"
#include "tk/kendall.hpp"
#include "tk/kernels.hpp"

using namespace tk;

namespace {

std::map<std::uint64_t, double> column(const SparseFeatureMatrix& m, std::size_t c) {
  std::map<std::uint64_t, double> out;
  const auto idx = m.indices(c);
  const auto val = m.values(c);
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = val[k];
  return out;
}

TripletStore store_of(std::vector<Triplet> t, std::size_t n) { return TripletStore::ingest(t, n); }

}  // namespace

TEST_SUITE("feature_maps") {

TEST_CASE("pair index layouts") {
  const std::uint64_t n = 6;
  std::uint64_t expect = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = i + 1; j < n; ++j) CHECK(pair_index(i, j, n) == expect++);
  CHECK(expect == n * (n - 1) / 2);
  expect = 0;
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      if (i != j) CHECK(ordered_pair_index(i, j, n) == expect++);
  CHECK(expect == n * (n - 1));
}

TEST_CASE("anchor map by hand") {
  const auto s = store_of({{0, 1, 2}, {0, 2, 3}}, 4);
  CHECK(testing::code_of([&] { build_phi_k1(s, false); }) == Errc::MissingAnchor);
  try {
    build_phi_k1(s, false);
  } catch (const Error& e) {
    CHECK(e.objects() == std::vector<std::size_t>{1, 2, 3});
  }

  // Give the other objects one comparison each; column 0 is unaffected.
  const auto full = store_of({{0, 1, 2}, {0, 2, 3}, {1, 0, 2}, {2, 0, 1}, {3, 0, 1}}, 4);
  const auto m = build_phi_k1(full, false);
  CHECK(m.kind() == FeatureKind::K1);
  CHECK(m.dimension() == 6);
  const double h = 1.0 / std::sqrt(2.0);
  const auto c0 = column(m, 0);
  CHECK(c0.size() == 2);
  CHECK(c0.at(pair_index(1, 2, 4)) == doctest::Approx(h).epsilon(1e-15));
  CHECK(c0.at(pair_index(2, 3, 4)) == doctest::Approx(h).epsilon(1e-15));
  // (1,0,2): anchor 1, pair (0,2), 0 closer -> +1.
  CHECK(column(m, 1) == std::map<std::uint64_t, double>{{pair_index(0, 2, 4), 1.0}});
  // (2,0,1): pair (0,1), lower index closer -> +1.
  CHECK(column(m, 2) == std::map<std::uint64_t, double>{{pair_index(0, 1, 4), 1.0}});
}

TEST_CASE("anchor map rejects contradictions when unweighted") {
  const auto s = store_of({{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {2, 0, 1}}, 3);
  CHECK(testing::code_of([&] { build_phi_k1(s, false); }) == Errc::ContradictionPresent);
  CHECK_NOTHROW(build_phi_k1(resolve_majority(store_of({{0, 1, 2}, {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {2, 0, 1}}, 3)),
                             false));
}

TEST_CASE("weighted anchor map") {
  // #(0,1,2)=3, #(0,2,1)=1 -> (3-1)/(3+1) = 1/2, normalized to 1.
  std::vector<TripletEntry> entries{{0, 1, 2, 3, 1}, {1, 0, 2, 1, 0}, {2, 0, 1, 0, 1}};
  const auto s = TripletStore::from_entries(3, entries);
  const auto m = build_phi_k1(s, true);
  CHECK(column(m, 0) == std::map<std::uint64_t, double>{{pair_index(1, 2, 3), 1.0}});
  CHECK(column(m, 2) == std::map<std::uint64_t, double>{{pair_index(0, 1, 3), -1.0}});

  // Two slots for anchor 0: weights 1/2 and -1 -> normalized by sqrt(5/4).
  const auto s2 = TripletStore::from_entries(4, {{0, 1, 2, 3, 1}, {0, 1, 3, 0, 2}, {1, 0, 2, 1, 0}, {2, 0, 1, 1, 0},
                                                 {3, 0, 1, 1, 0}});
  const auto c0 = column(build_phi_k1(s2, true), 0);
  const double z = std::sqrt(1.25);
  CHECK(c0.at(pair_index(1, 2, 4)) == doctest::Approx(0.5 / z).epsilon(1e-15));
  CHECK(c0.at(pair_index(1, 3, 4)) == doctest::Approx(-1.0 / z).epsilon(1e-15));

  // An anchor whose only comparison is tied has no usable column.
  const auto tied = TripletStore::from_entries(3, {{0, 1, 2, 2, 2}, {1, 0, 2, 1, 0}, {2, 0, 1, 1, 0}});
  CHECK(testing::code_of([&] { build_phi_k1(tied, true); }) == Errc::MissingAnchor);
}

TEST_CASE("non-anchor map by hand") {
  // (1,0,2): anchor 1, 0 closer than 2.
  const auto s = store_of({{1, 0, 2}, {0, 1, 3}, {2, 3, 1}, {3, 2, 0}}, 4);
  const auto m = build_phi_k2(s, false);
  CHECK(m.kind() == FeatureKind::K2);
  CHECK(m.dimension() == 12);
  // Column 0: +1 at (1,2) from (1,0,2); -1 at (3,2) from (3,2,0); two
  // non-anchor appearances -> scale 1/sqrt(2).
  const double h = 1.0 / std::sqrt(2.0);
  const auto c0 = column(m, 0);
  CHECK(c0.size() == 2);
  CHECK(c0.at(ordered_pair_index(1, 2, 4)) == doctest::Approx(h).epsilon(1e-15));
  CHECK(c0.at(ordered_pair_index(3, 2, 4)) == doctest::Approx(-h).epsilon(1e-15));
  // Column 2: -1 at (1,0) from (1,0,2); +1 at (3,0) from (3,2,0). In
  // (2,3,1) object 2 is the anchor.
  const auto c2 = column(m, 2);
  CHECK(c2.size() == 2);
  CHECK(c2.at(ordered_pair_index(1, 0, 4)) == doctest::Approx(-h).epsilon(1e-15));
  CHECK(c2.at(ordered_pair_index(3, 0, 4)) == doctest::Approx(h).epsilon(1e-15));
}

TEST_CASE("non-anchor map single triple") {
  const auto s = store_of({{1, 0, 2}}, 3);
  // Object 1 only anchors.
  CHECK(testing::code_of([&] { build_phi_k2(s, false); }) == Errc::MissingNonAnchor);
  const auto s4 = store_of({{1, 0, 2}, {0, 1, 2}}, 3);
  const auto m = build_phi_k2(s4, false);
  CHECK(column(m, 2) == std::map<std::uint64_t, double>{{ordered_pair_index(0, 1, 3), -1.0 / std::sqrt(2.0)},
                                                        {ordered_pair_index(1, 0, 3), -1.0 / std::sqrt(2.0)}});
  CHECK(column(m, 0) == std::map<std::uint64_t, double>{{ordered_pair_index(1, 2, 3), 1.0}});
}

TEST_CASE("complete correct data equals the triplet-expressible tau map") {
  std::mt19937_64 gen(99);
  for (std::size_t n = 4; n <= 10; ++n) {
    const auto pts = oracle::random_points(gen, n);
    const auto dd = oracle::distance_matrix(pts);
    const auto d = testing::euclidean(pts);
    const auto m = build_phi_k1(TripletStore::ingest(testing::all_correct(dd), n), false);
    for (std::size_t a = 0; a < n; ++a) {
      const auto ref = anchored_tau_feature_map(d, a);
      const auto col = column(m, a);
      for (std::uint64_t k = 0; k < ref.size(); ++k) {
        const auto it = col.find(k);
        const double got = it == col.end() ? 0.0 : it->second;
        CHECK(got == doctest::Approx(ref[k]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("columns are unit vectors with expected support") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial) % 6;
    const auto raw = testing::random_store(gen, n, 10 * n);
    for (bool weighted : {false, true}) {
      const auto s = weighted ? raw : resolve_majority(raw);
      const auto cov = coverage(s);
      if (!cov.missing_anchor().empty() || !cov.missing_non_anchor().empty()) continue;
      SparseFeatureMatrix k1, k2;
      try {
        k1 = build_phi_k1(s, weighted);
        k2 = build_phi_k2(s, weighted);
      } catch (const Error& e) {
        // Weighted columns can vanish when every comparison is tied.
        CHECK(weighted);
        continue;
      }
      std::size_t k1_nonzeros = 0;
      for (std::size_t c = 0; c < n; ++c) {
        CHECK(std::abs(k1.column_norm(c) - 1.0) < 1e-12);
        CHECK(std::abs(k2.column_norm(c) - 1.0) < 1e-12);
        for (double v : k1.values(c)) CHECK(std::abs(v) <= 1.0);
        for (double v : k2.values(c)) CHECK(std::abs(v) <= 1.0);
        k1_nonzeros += k1.indices(c).size();
        if (!weighted) {
          CHECK(k1.indices(c).size() == cov.anchor_counts[c]);
          for (double v : k1.values(c))
            CHECK(std::abs(v) == doctest::Approx(1.0 / std::sqrt(double(cov.anchor_counts[c]))));
        }
      }
      CHECK(k1_nonzeros <= s.total());
      CHECK(k2.non_zeros() <= 2 * s.total());
    }
  }
}

TEST_CASE("negation") {
  std::mt19937_64 gen(4);
  const auto s = resolve_majority(testing::random_store(gen, 7, 50));
  const auto m = build_phi_k1(s, false);
  CHECK(negate(negate(m)) == m);
  CHECK(gram(negate(m), 1).entries == gram(m, 1).entries);

  const auto pts = oracle::random_points(gen, 6);
  const auto dd = oracle::distance_matrix(pts);
  const auto right = build_phi_k1(TripletStore::ingest(testing::all_correct(dd), 6), false);
  const auto wrong = build_phi_k1(TripletStore::ingest(testing::all_correct(dd, true), 6), false);
  CHECK(wrong == negate(right));
  const auto right2 = build_phi_k2(TripletStore::ingest(testing::all_correct(dd), 6), false);
  const auto wrong2 = build_phi_k2(TripletStore::ingest(testing::all_correct(dd, true), 6), false);
  CHECK(wrong2 == negate(right2));
}

TEST_CASE("feature dump format") {
  const auto m = build_phi_k1(store_of({{0, 1, 2}, {1, 0, 2}, {2, 1, 0}}, 3), false);
  std::ostringstream out;
  write_feature_dump(out, m);
  CHECK(out.str() == "k1,3,3\n0,2,1\n1,1,1\n2,0,-1\n");
}

TEST_CASE("explicit construction validates") {
  CHECK(testing::code_of([] {
          SparseFeatureMatrix(FeatureKind::Custom, 1, 3, {{{1, 0.5}, {1, 0.5}}});
        }) == Errc::InvalidArgument);
  CHECK(testing::code_of([] { SparseFeatureMatrix(FeatureKind::Custom, 1, 3, {{{3, 1.0}}}); }) ==
        Errc::IndexOutOfRange);
  const SparseFeatureMatrix m(FeatureKind::Custom, 1, 3, {{{2, 0.6}, {0, 0.8}}});
  CHECK(m.indices(0)[0] == 0);
  CHECK(m.column_norm(0) == doctest::Approx(1.0));
}

}  // TEST_SUITE
