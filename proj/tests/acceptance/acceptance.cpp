// Acceptance suite: one line per criterion, "[PASS] n ..." or "[FAIL] n ...".
// Usage: tk_acceptance [criterion...]   (default: all)

#include <sys/resource.h>

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "../oracles.hpp"
#include "tk/cli.hpp"
#include "tk/feature_maps.hpp"
#include "tk/kendall.hpp"
#include "tk/kernels.hpp"
#include "tk/methods.hpp"
#include "tk/synth.hpp"

namespace fs = std::filesystem;
using namespace tk;

namespace {

// Tolerances and thresholds.
constexpr double kOracleTol = 1e-12;           // 1
constexpr double kOracleSeconds = 5.0;         // 1
constexpr double kGoldenTol = 1e-15;           // 3
constexpr double kSymmetryTol = 1e-12;         // 4, 7
constexpr double kSymmetrySeconds = 30.0;      // 4
constexpr double kPurityClean = 0.90;          // 5
constexpr double kPurityNoisy = 0.80;          // 5
constexpr double kRegimeSeconds = 15 * 60.0;   // 5
constexpr double kUShapeMatch = 0.05;          // 6
constexpr double kUShapeDip = 0.15;            // 6
constexpr double kPsdFloor = -1e-9;            // 7
constexpr double kCorrectedCeiling = 1e-6;     // 7
constexpr double kProcrustesTol = 1e-8;        // 8
constexpr double kBuildSeconds = 60.0;         // 9
constexpr double kMemoryBytes = 2.0 * (1u << 30);  // 9

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / ("tk_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
};

// Runs the CLI inside `dir` so that every path it records is relative.
void cli_in(const fs::path& dir, std::vector<std::string> args) {
  fs::create_directories(dir);
  const fs::path back = fs::current_path();
  fs::current_path(dir);
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  fs::current_path(back);
  if (code != 0) throw std::runtime_error("tk " + args.front() + " failed: " + err.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, double> read_means(const fs::path& csv) {
  // fraction,errprob,kernel,method,repeats,mean_purity,...
  std::map<std::string, double> out;
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    out[f[0] + "/" + f[1] + "/" + f[2]] = std::stod(f[5]);
  }
  return out;
}

Matrix dense(const oracle::Dense& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
  return m;
}

double max_diff(const Matrix& a, const Matrix& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) w = std::max(w, std::abs(a(i, j) - b(i, j)));
  return w;
}

Dataset dataset_of(const oracle::Points& p) {
  Dataset d;
  d.points = p;
  d.labels.assign(p.size(), 0);
  return d;
}

// ---------------------------------------------------------------------------

Verdict criterion_1() {
  std::mt19937_64 gen(2024);
  const auto start = Clock::now();
  double worst_full = 0.0, worst_restricted = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + static_cast<std::size_t>(trial) % 7;
    const auto pts = oracle::random_points(gen, n);
    const auto dd = oracle::distance_matrix(pts);
    const auto store = sample_triplets(euclidean_oracle(dataset_of(pts)), {1.0, 0.0, 1});
    const auto k1 = gram(build_phi_k1(store, false), 1);
    worst_full = std::max(worst_full, max_diff(k1.entries, dense(oracle::tau_gram(dd))));
    worst_restricted = std::max(worst_restricted, max_diff(k1.entries, dense(oracle::triplet_tau_gram(dd))));
  }
  const double secs = since(start);
  std::cout << fmt("[INFO] 1  k1 vs tau restricted to triplet-expressible pairs: max |diff| = %.3g\n",
                   worst_restricted);
  return {worst_full < kOracleTol && secs < kOracleSeconds,
          fmt("k1 vs full Kendall-tau Gram over 20 sets: max |diff| = %.3g (tol %.0e), %.2f s", worst_full, kOracleTol,
              secs)};
}

Verdict criterion_2() {
  const std::uint64_t total = comparison_count(400);
  const std::uint64_t tenth = sample_size(0.1, total);
  return {total == 31'760'400 && tenth == 3'176'040,
          fmt("n=400: %llu comparisons, 10%% = %llu", (unsigned long long)total, (unsigned long long)tenth)};
}

Verdict criterion_3() {
  auto from_one_based = [](std::vector<std::size_t> o) {
    for (auto& v : o) --v;
    return Ranking::from_order(o);
  };
  const Ranking r1 = from_one_based({1, 3, 2, 4, 5, 6, 7});
  const Ranking r2 = from_one_based({2, 3, 6, 1, 5, 4, 7});
  const Ranking r7 = from_one_based({7, 5, 6, 3, 4, 2, 1});
  // Exact rational check on the pair counts, then the floating value.
  auto exact = [](const PairCounts& c, long long num, long long den) {
    return (static_cast<long long>(c.concordant) - static_cast<long long>(c.discordant)) * den ==
           num * static_cast<long long>(c.pairs);
  };
  const bool rational = exact(count_pairs(r1, r2), 1, 3) && exact(count_pairs(r1, r7), -5, 7) &&
                        exact(count_pairs(r2, r7), -3, 7);
  const double t12 = kendall_tau(r1, r2), t17 = kendall_tau(r1, r7), t27 = kendall_tau(r2, r7);
  const bool floats = std::abs(t12 - 1.0 / 3) < kGoldenTol && std::abs(t17 + 5.0 / 7) < kGoldenTol &&
                      std::abs(t27 + 3.0 / 7) < kGoldenTol;

  const oracle::Points golden{{2.43, 2.50}, {2.74, 4.99}, {3.53, 4.40}, {5.32, 2.47},
                              {5.41, 3.95}, {3.90, 6.49}, {6.29, 5.82}};
  const Dissimilarity d(dense(oracle::distance_matrix(golden)), TieBreak::Reject);
  const CountScore s12 = k2_count_score(d, 0, 1);
  const CountScore s17 = k2_count_score(d, 0, 6);
  const CountScore s27 = k2_count_score(d, 1, 6);
  const bool counts = s12.agree == 32 && s12.disagree == 17 && s12.slots == 49 &&
                      s17.agree - s17.disagree == 3 && s27.agree - s27.disagree == 1;
  return {rational && floats && counts,
          fmt("tau = %.17g, %.17g, %.17g; k2 count form = (%lld-%lld)/%lld, %lld/49, %lld/49", t12, t17, t27,
              (long long)s12.agree, (long long)s12.disagree, (long long)s12.slots,
              (long long)(s17.agree - s17.disagree), (long long)(s27.agree - s27.disagree))};
}

// Pipelines shared by criteria 4-6 and re-run for 10.
void pipeline_4(const fs::path& dir) {
  for (const char* e : {"0", "1"}) {
    const std::string tag = e;
    cli_in(dir, {"gen", "--n", "50", "--fraction", "1", "--errprob", e, "--seed", "7", "--dataset",
                 "data_" + tag + ".csv", "--triplets", "triplets_" + tag + ".txt"});
    cli_in(dir, {"kernel", "--triplets", "triplets_" + tag + ".txt", "--kernel", "k1", "--dominance_fix", "false",
                 "--out", "k1_" + tag + ".txt"});
  }
}

void pipeline_5(const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "regime.cfg") << "n=300\noracle=euclidean\nkernels=k1,k2,k3\nrepeats=20\nrestarts=10\n"
                                       "max_iter=100\nseed=1\n";
  cli_in(dir, {"experiment", "--config", "regime.cfg", "--fractions", "0.1", "--errprobs", "0", "--out",
               "clean.csv"});
  cli_in(dir, {"experiment", "--config", "regime.cfg", "--fractions", "0.2", "--errprobs", "0.3", "--out",
               "noisy.csv"});
}

void pipeline_6(const fs::path& dir) {
  cli_in(dir, {"experiment", "--n", "60", "--fractions", "1", "--errprobs", "0,0.5,1", "--kernels", "k1",
               "--repeats", "20", "--seed", "3", "--out", "ushape.csv"});
}

Verdict criterion_4(const fs::path& dir) {
  const auto start = Clock::now();
  fs::create_directories(dir);
  pipeline_4(dir);
  const double secs = since(start);
  const auto a = read_kernel_file(dir / "k1_0.txt");
  const auto b = read_kernel_file(dir / "k1_1.txt");
  const bool flipped = slurp(dir / "triplets_0.txt") != slurp(dir / "triplets_1.txt") &&
                       slurp(dir / "data_0.csv") == slurp(dir / "data_1.csv");
  const double diff = max_diff(a.entries, b.entries);
  return {flipped && diff <= kSymmetryTol && secs < kSymmetrySeconds,
          fmt("n=50, fraction=1: max |K(errprob=1) - K(errprob=0)| = %.3g, answers flipped: %s, %.2f s", diff,
              flipped ? "yes" : "no", secs)};
}

Verdict criterion_5(const fs::path& dir) {
  const auto start = Clock::now();
  fs::create_directories(dir);
  pipeline_5(dir);
  const double secs = since(start);
  const auto clean = read_means(dir / "clean.csv");
  const auto noisy = read_means(dir / "noisy.csv");
  bool ok = secs < kRegimeSeconds;
  std::string detail;
  for (const char* k : {"k1", "k2", "k3"}) {
    const double c = clean.at(std::string("0.1/0/") + k);
    const double e = noisy.at(std::string("0.2/0.3/") + k);
    ok = ok && c >= kPurityClean && e >= kPurityNoisy;
    detail += fmt("%s %.3f/%.3f ", k, c, e);
  }
  return {ok, "mean purity (10% clean / 20% errprob 0.3): " + detail + fmt("(>= %.2f / %.2f), %.0f s", kPurityClean,
                                                                           kPurityNoisy, secs)};
}

Verdict criterion_6(const fs::path& dir) {
  fs::create_directories(dir);
  pipeline_6(dir);
  const auto m = read_means(dir / "ushape.csv");
  const double p0 = m.at("1/0/k1"), ph = m.at("1/0.5/k1"), p1 = m.at("1/1/k1");
  const bool ok = std::abs(p1 - p0) <= kUShapeMatch && ph <= std::min(p0, p1) - kUShapeDip;
  return {ok, fmt("n=60, fraction=1, k1: purity %.3f / %.3f / %.3f at errprob 0 / 0.5 / 1", p0, ph, p1)};
}

Verdict criterion_7() {
  std::mt19937_64 gen(77);
  double worst_asym = 0.0, worst_diag = 0.0, min_before = 1e300, min_after = 1e300, max_after = -1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + gen() % 33;
    TripletStore store;
    if (trial % 2 == 0) {
      // Simulated answers with noise.
      const auto pts = oracle::random_points(gen, n);
      const double fraction = 0.2 + 0.8 * std::uniform_real_distribution<double>()(gen);
      const double errprob = 0.5 * std::uniform_real_distribution<double>()(gen);
      store = sample_triplets(euclidean_oracle(dataset_of(pts)), {fraction, errprob, gen()});
    } else {
      // Arbitrary triples, duplicates and contradictions included.
      std::vector<Triplet> t;
      for (std::size_t a = 0; a < n; ++a) t.push_back({a, (a + 1) % n, (a + 2) % n});
      for (std::size_t a = 0; a < n; ++a) t.push_back({(a + 2) % n, a, (a + 1) % n});
      while (t.size() < 15 * n) {
        const std::size_t a = gen() % n, b = gen() % n, c = gen() % n;
        if (a != b && b != c && a != c) t.push_back({a, b, c});
      }
      store = resolve_majority(TripletStore::ingest(t, n));
    }
    for (const auto& f : {build_phi_k1(store, false), build_phi_k2(store, false)}) {
      const auto k = gram(f, 1);
      worst_asym = std::max(worst_asym, asymmetry(k.entries));
      for (std::size_t i = 0; i < n; ++i) worst_diag = std::max(worst_diag, std::abs(k(i, i) - 1.0));
      min_before = std::min(min_before, smallest_eigenvalue(k));
      const double after = smallest_eigenvalue(reduce_diagonal_dominance(k));
      min_after = std::min(min_after, after);
      max_after = std::max(max_after, after);
    }
  }
  const bool ok = worst_asym <= kSymmetryTol && worst_diag <= 1e-12 && min_before >= kPsdFloor &&
                  min_after >= kPsdFloor && max_after <= kCorrectedCeiling;
  return {ok, fmt("50 stores x {k1,k2}: asym %.2g, |diag-1| %.2g, min eig %.3g, corrected eig in [%.3g, %.3g]",
                  worst_asym, worst_diag, min_before, min_after, max_after)};
}

KernelMatrix linear_kernel(const oracle::Points& p) {
  KernelMatrix k;
  k.entries = Matrix(p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < p[i].size(); ++t) s += p[i][t] * p[j][t];
      k.entries(i, j) = s;
    }
  return k;
}

Verdict criterion_8() {
  std::mt19937_64 gen(8);

  // Kernel PCA against classical PCA on the coordinates.
  const std::size_t n = 100;
  auto pts = oracle::random_points(gen, n);
  for (auto& p : pts) p[1] *= 0.4;
  const auto proj = kernel_pca(linear_kernel(pts), 2);
  Eigen::MatrixXd x(n, 2), y(n, 2);
  for (std::size_t i = 0; i < n; ++i) x.row(i) << pts[i][0], pts[i][1];
  x.rowwise() -= x.colwise().mean();
  const Eigen::JacobiSVD<Eigen::MatrixXd> pca(x, Eigen::ComputeThinV);
  const Eigen::MatrixXd classical = x * pca.matrixV();  // principal coordinates
  for (std::size_t i = 0; i < n; ++i) y.row(i) << proj.coordinates(i, 0), proj.coordinates(i, 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> align(y.transpose() * classical, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double residual = (y * (align.matrixU() * align.matrixV().transpose()) - classical).norm();

  // Complete linkage against the naive agglomeration.
  int linkage_ok = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_points(gen, 10, 3);
    const auto tree = complete_linkage(linear_kernel(p));
    const auto ref = oracle::naive_complete_linkage(oracle::distance_matrix(p));
    bool same = tree.merges.size() == ref.size();
    for (std::size_t m = 0; same && m < ref.size(); ++m)
      same = tree.merges[m].left == ref[m].left && tree.merges[m].right == ref[m].right &&
             std::abs(tree.merges[m].height - ref[m].height) <= 1e-9 * std::max(1.0, ref[m].height);
    linkage_ok += same;
  }

  // Kernel k-means against coordinate k-means from the same seeds.
  int kmeans_ok = 0;
  const int kmeans_trials = 20;
  for (int trial = 0; trial < kmeans_trials; ++trial) {
    const auto p = oracle::random_points(gen, 30 + trial, 2);
    const std::size_t k = 2 + trial % 3;
    const std::uint64_t seed = 500 + trial;
    SplitMix64 rng(seed);
    double obj = 0.0;
    const auto ref = oracle::coordinate_kmeans(p, draw_initial_centers(rng, p.size(), k), 100, &obj);
    kmeans_ok += kernel_kmeans(linear_kernel(p), {k, 1, 100, seed}).assignment == ref;
  }

  const bool ok = residual < kProcrustesTol && linkage_ok == 30 && kmeans_ok == kmeans_trials;
  return {ok, fmt("PCA Procrustes residual %.3g (n=100); linkage %d/30 identical; k-means %d/%d identical", residual,
                  linkage_ok, kmeans_ok, kmeans_trials)};
}

Verdict criterion_9() {
  MixtureConfig mixture;
  mixture.n = 400;
  mixture.seed = 9;
  const Dataset data = gaussian_mixture(mixture);
  const TripletStore store = sample_triplets(euclidean_oracle(data), {0.1, 0.0, 9});
  const bool count_ok = store.total() == 3'176'040;

  std::string detail;
  bool ok = count_ok;
  for (KernelKind kind : {KernelKind::K1, KernelKind::K2, KernelKind::K3}) {
    KernelSpec spec;
    spec.kind = kind;
    const auto start = Clock::now();
    const KernelMatrix k = build_kernel(store, spec);
    const double secs = since(start);
    ok = ok && secs < kBuildSeconds && k.provenance.dominance_corrected;
    detail += fmt("%s %.2f s, ", std::string(to_string(kind)).c_str(), secs);
  }
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak = static_cast<double>(usage.ru_maxrss) * 1024.0;
  ok = ok && peak < kMemoryBytes;
  return {ok, fmt("n=400, |S|=%llu: ", (unsigned long long)store.total()) + detail +
                  fmt("peak RSS %.0f MiB (budget %.0f s, 2048 MiB)", peak / (1 << 20), kBuildSeconds)};
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Verdict criterion_10(const fs::path& first, const fs::path& second) {
  for (const auto& sub : {"c4", "c5", "c6"}) {
    if (fs::exists(first / sub)) continue;
    if (std::string(sub) == "c4") pipeline_4(first / sub);
    if (std::string(sub) == "c5") pipeline_5(first / sub);
    if (std::string(sub) == "c6") pipeline_6(first / sub);
  }
  pipeline_4(second / "c4");
  pipeline_5(second / "c5");
  pipeline_6(second / "c6");
  const auto a = artifacts(first), b = artifacts(second);
  std::size_t same = 0;
  std::uint64_t digest = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it != b.end() && it->second == bytes) ++same;
    digest ^= fnv1a(name + '\0' + bytes);
  }
  const bool ok = a.size() == b.size() && same == a.size() && !a.empty();
  return {ok, fmt("%zu artifacts, %zu byte-identical across two runs (digest %016llx)", a.size(), same,
                  (unsigned long long)digest)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty())
    for (int c = 1; c <= 10; ++c) wanted.push_back(c);

  Workspace ws;
  const fs::path run1 = ws.root / "run1", run2 = ws.root / "run2";
  const std::map<int, std::function<Verdict()>> suite{
      {1, criterion_1},
      {2, criterion_2},
      {3, criterion_3},
      {4, [&] { return criterion_4(run1 / "c4"); }},
      {5, [&] { return criterion_5(run1 / "c5"); }},
      {6, [&] { return criterion_6(run1 / "c6"); }},
      {7, criterion_7},
      {8, criterion_8},
      {9, criterion_9},
      {10, [&] { return criterion_10(run1, run2); }},
  };

  int failed = 0;
  for (int c : wanted) {
    const auto it = suite.find(c);
    if (it == suite.end()) {
      std::cerr << "unknown criterion " << c << '\n';
      return 2;
    }
    Verdict v;
    try {
      v = it->second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << c << (c < 10 ? "  " : " ") << v.detail << std::endl;
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
