#include "tk/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tk/error.hpp"
#include "tk/feature_maps.hpp"
#include "tk/methods.hpp"
#include "tk/synth.hpp"
#include "tk/triplets.hpp"

namespace tk::cli {

namespace {

struct KeySpec {
  const char* key;
  const char* fallback;
  const char* help;
};

// clang-format off
constexpr KeySpec kKeys[] = {
  {"dataset", "", "dataset file (gen: output; kernel: object count; cluster: labels for purity)"},
  {"triplets", "", "triplet file (gen: output; kernel: input)"},
  {"kernel_file", "", "kernel matrix file (cluster/pca/linkage input)"},
  {"out", "", "output file"},
  {"timing_out", "", "experiment: wall-clock table output"},
  {"features_out", "", "kernel: optional sparse feature dump (k1/k2)"},
  {"n", "300", "gen/experiment: number of points"},
  {"objects", "0", "kernel: object count (0 = from dataset or largest index)"},
  {"means", "0,0;5,0;2.5,4.33", "mixture means, ';'-separated points"},
  {"stddev", "1", "mixture standard deviation"},
  {"oracle", "euclidean", "dissimilarity: euclidean | mst"},
  {"fraction", "0.1", "gen: fraction of all comparisons to sample"},
  {"errprob", "0", "gen: probability of flipping an answer"},
  {"seed", "1", "random seed"},
  {"kernel", "k1", "kernel: k1 | k2 | k3"},
  {"mu1", "1", "k3 weight of k1"},
  {"mu2", "1", "k3 weight of k2"},
  {"weighted", "false", "use multiplicity-weighted feature maps"},
  {"dominance_fix", "true", "subtract the smallest eigenvalue from the diagonal"},
  {"threads", "1", "worker threads"},
  {"clusters", "3", "cluster/experiment: number of clusters (experiment: 0 = mixture components)"},
  {"restarts", "10", "k-means restarts"},
  {"max_iter", "100", "k-means iteration cap"},
  {"components", "2", "pca: number of components"},
  {"fractions", "0.1", "experiment: comma-separated fractions"},
  {"errprobs", "0", "experiment: comma-separated error probabilities"},
  {"kernels", "k1,k2,k3", "experiment: comma-separated kernels"},
  {"repeats", "1", "experiment: runs per grid cell"},
};
// clang-format on

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double to_double(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') throw Error(Errc::InvalidArgument, key + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || text.front() == '-')
    throw Error(Errc::InvalidArgument, key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(Errc::InvalidArgument, key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(key, part));
  if (out.empty()) throw Error(Errc::InvalidArgument, key + ": empty list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sidecar(const std::filesystem::path& artifact, const RunConfig& cfg,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
  std::filesystem::path meta = artifact;
  meta += ".meta";
  std::ofstream out(meta, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + meta.string());
  out << "command=" << cfg.command << '\n';
  for (const auto& [key, value] : cfg.settings) out << key << '=' << value << '\n';
  for (const auto& [key, value] : extra) out << key << '=' << value << '\n';
  if (!out) throw Error(Errc::Io, "write failed for " + meta.string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

void require_path(const std::filesystem::path& p, const char* key, const std::string& command) {
  if (p.empty()) throw Error(Errc::InvalidArgument, command + " needs --" + key);
}

void cmd_gen(const RunConfig& cfg, std::ostream& out) {
  require_path(cfg.dataset, "dataset", cfg.command);
  require_path(cfg.triplets, "triplets", cfg.command);
  MixtureConfig mixture;
  mixture.n = cfg.n;
  mixture.means = cfg.means;
  mixture.stddev = cfg.stddev;
  mixture.seed = cfg.seed;
  const Dataset data = gaussian_mixture(mixture);
  const Dissimilarity oracle = cfg.oracle == OracleKind::Euclidean ? euclidean_oracle(data) : mst_path_oracle(data);
  const TripletStore store = sample_triplets(oracle, {cfg.fraction, cfg.errprob, derive_seed(cfg.seed, 1)});
  write_dataset_file(cfg.dataset, data);
  write_triplet_file(cfg.triplets, store);
  write_sidecar(cfg.triplets, cfg, {{"result.triplets", std::to_string(store.total())}});
  out << "points=" << data.size() << " triplets=" << store.total() << '\n';
}

void cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  require_path(cfg.triplets, "triplets", cfg.command);
  require_path(cfg.out, "out", cfg.command);
  std::optional<std::size_t> n;
  if (cfg.objects > 0) {
    n = cfg.objects;
  } else if (!cfg.dataset.empty()) {
    n = read_dataset_file(cfg.dataset).size();
  }
  const TripletStore store = load_triplet_store(cfg.triplets, n);

  KernelSpec spec;
  spec.kind = cfg.kernel_kind;
  spec.mu1 = cfg.mu1;
  spec.mu2 = cfg.mu2;
  spec.weighted = cfg.weighted;
  spec.dominance_fix = cfg.dominance_fix;
  spec.threads = cfg.threads;
  const KernelMatrix k = build_kernel(store, spec);

  if (!cfg.features_out.empty()) {
    if (cfg.kernel_kind == KernelKind::K3)
      throw Error(Errc::InvalidArgument, "features_out is available for k1 and k2 only");
    const TripletStore input = cfg.weighted ? store : resolve_majority(store);
    const SparseFeatureMatrix features = cfg.kernel_kind == KernelKind::K1 ? build_phi_k1(input, cfg.weighted)
                                                                           : build_phi_k2(input, cfg.weighted);
    write_feature_dump_file(cfg.features_out, features);
  }

  write_kernel_file(cfg.out, k);
  std::vector<std::pair<std::string, std::string>> extra;
  for (auto [key, value] : k.provenance.key_values()) extra.emplace_back("provenance." + key, value);
  extra.emplace_back("result.triplets", std::to_string(store.total()));
  write_sidecar(cfg.out, cfg, extra);
  out << "n=" << k.size() << " lambda_min=" << fmt(k.provenance.lambda_min) << '\n';
}

KernelMatrix load_kernel_input(const RunConfig& cfg) {
  require_path(cfg.kernel, "kernel_file", cfg.command);
  require_path(cfg.out, "out", cfg.command);
  return read_kernel_file(cfg.kernel);
}

void cmd_cluster(const RunConfig& cfg, std::ostream& out) {
  const KernelMatrix k = load_kernel_input(cfg);
  KMeansOptions options;
  options.clusters = cfg.clusters;
  options.restarts = cfg.restarts;
  options.max_iter = cfg.max_iter;
  options.seed = cfg.seed;
  const ClusteringResult result = kernel_kmeans(k, options);
  std::vector<std::pair<std::string, std::string>> extra{{"result.objective", fmt(result.objective)},
                                                         {"result.iterations", std::to_string(result.iterations)}};
  if (!cfg.dataset.empty()) {
    const Dataset data = read_dataset_file(cfg.dataset);
    const PurityScore score = purity(result.assignment, data.labels);
    extra.emplace_back("result.purity", fmt(score.value));
    out << "purity=" << fmt(score.value) << '\n';
  }
  auto file = open_output(cfg.out);
  write_clustering(file, result);
  file.close();
  write_sidecar(cfg.out, cfg, extra);
}

void cmd_pca(const RunConfig& cfg, std::ostream& out) {
  const KernelMatrix k = load_kernel_input(cfg);
  const PcaProjection projection = kernel_pca(k, cfg.components);
  auto file = open_output(cfg.out);
  write_projection(file, projection);
  file.close();
  std::vector<std::pair<std::string, std::string>> extra;
  for (std::size_t c = 0; c < projection.eigenvalues.size(); ++c)
    extra.emplace_back("result.eigenvalue" + std::to_string(c + 1), fmt(projection.eigenvalues[c]));
  write_sidecar(cfg.out, cfg, extra);
  out << "rows=" << projection.coordinates.rows() << " components=" << projection.coordinates.cols() << '\n';
}

void cmd_linkage(const RunConfig& cfg, std::ostream& out) {
  const KernelMatrix k = load_kernel_input(cfg);
  const Dendrogram tree = complete_linkage(k);
  auto file = open_output(cfg.out);
  write_dendrogram(file, tree);
  file.close();
  write_sidecar(cfg.out, cfg, {});
  out << "merges=" << tree.merges.size() << '\n';
}

void cmd_experiment(const RunConfig& cfg, std::ostream& out) {
  require_path(cfg.out, "out", cfg.command);
  ExperimentConfig ex;
  ex.mixture.n = cfg.n;
  ex.mixture.means = cfg.means;
  ex.mixture.stddev = cfg.stddev;
  ex.oracle = cfg.oracle;
  ex.fractions = cfg.fractions;
  ex.errprobs = cfg.errprobs;
  ex.kernels = cfg.kernels;
  ex.mu1 = cfg.mu1;
  ex.mu2 = cfg.mu2;
  ex.weighted = cfg.weighted;
  ex.dominance_fix = cfg.dominance_fix;
  ex.clusters = cfg.explicit_keys.count("clusters") ? cfg.clusters : 0;
  ex.restarts = cfg.restarts;
  ex.max_iter = cfg.max_iter;
  ex.repeats = cfg.repeats;
  ex.seed = cfg.seed;
  ex.threads = cfg.threads;
  const std::vector<ExperimentRow> rows = run_experiment(ex);

  auto file = open_output(cfg.out);
  write_results(file, rows);
  file.close();
  if (!cfg.timing_out.empty()) {
    auto timing = open_output(cfg.timing_out);
    write_timing(timing, rows);
  }
  write_sidecar(cfg.out, cfg, {});
  out << "rows=" << rows.size() << '\n';
}

}  // namespace

const std::map<std::string, std::string>& default_settings() {
  static const std::map<std::string, std::string> defaults = [] {
    std::map<std::string, std::string> m;
    for (const KeySpec& k : kKeys) m.emplace(k.key, k.fallback);
    return m;
  }();
  return defaults;
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidArgument, "config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (!default_settings().count(key))
      throw Error(Errc::InvalidArgument, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config file " + path.string());
  return parse_config(in);
}

RunConfig resolve_config(const std::string& command, const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags) {
  RunConfig cfg;
  cfg.command = command;
  cfg.settings = default_settings();
  for (const auto* layer : {&file, &flags}) {
    for (const auto& [key, value] : *layer) {
      if (!cfg.settings.count(key)) throw Error(Errc::InvalidArgument, "unknown key '" + key + "'");
      cfg.settings[key] = value;
      cfg.explicit_keys.insert(key);
    }
  }
  const auto& s = cfg.settings;
  auto get = [&](const char* key) -> const std::string& { return s.at(key); };

  cfg.dataset = get("dataset");
  cfg.triplets = get("triplets");
  cfg.kernel = get("kernel_file");
  cfg.out = get("out");
  cfg.timing_out = get("timing_out");
  cfg.features_out = get("features_out");
  cfg.n = to_uint("n", get("n"));
  cfg.objects = to_uint("objects", get("objects"));
  cfg.means.clear();
  for (const auto& point : split(get("means"), ';')) cfg.means.push_back(to_doubles("means", point));
  cfg.stddev = to_double("stddev", get("stddev"));
  cfg.oracle = parse_oracle_kind(get("oracle"));
  cfg.fraction = to_double("fraction", get("fraction"));
  cfg.errprob = to_double("errprob", get("errprob"));
  cfg.seed = to_uint("seed", get("seed"));
  cfg.kernel_kind = parse_kernel_kind(get("kernel"));
  cfg.mu1 = to_double("mu1", get("mu1"));
  cfg.mu2 = to_double("mu2", get("mu2"));
  cfg.weighted = to_bool("weighted", get("weighted"));
  cfg.dominance_fix = to_bool("dominance_fix", get("dominance_fix"));
  cfg.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, to_uint("threads", get("threads"))));
  cfg.clusters = to_uint("clusters", get("clusters"));
  cfg.restarts = to_uint("restarts", get("restarts"));
  cfg.max_iter = to_uint("max_iter", get("max_iter"));
  cfg.components = to_uint("components", get("components"));
  cfg.fractions = to_doubles("fractions", get("fractions"));
  cfg.errprobs = to_doubles("errprobs", get("errprobs"));
  cfg.kernels.clear();
  for (const auto& name : split(get("kernels"), ',')) cfg.kernels.push_back(parse_kernel_kind(name));
  cfg.repeats = to_uint("repeats", get("repeats"));

  const bool mu_given = cfg.explicit_keys.count("mu1") || cfg.explicit_keys.count("mu2");
  if (mu_given) {
    const bool uses_k3 = command == "experiment"
                             ? std::find(cfg.kernels.begin(), cfg.kernels.end(), KernelKind::K3) != cfg.kernels.end()
                             : cfg.kernel_kind == KernelKind::K3;
    if ((command == "kernel" || command == "experiment") && !uses_k3)
      throw Error(Errc::InvalidArgument, "mu1/mu2 only apply to the k3 kernel");
  }
  if (!(cfg.mu1 > 0.0) || !(cfg.mu2 > 0.0)) throw Error(Errc::NonPositiveWeight, "mu1 and mu2 must be positive");
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel functions from similarity triplets: simulation, kernels and kernel methods", "tk"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value settings file; flags override it");

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  for (const KeySpec& k : kKeys) {
    raw[k.key];
    options[k.key] = app.add_option(std::string("--") + k.key, raw[k.key], k.help)->default_str(k.fallback);
  }
  app.add_subcommand("gen", "simulate a Gaussian mixture and a triplet sample");
  app.add_subcommand("kernel", "compute a kernel matrix from a triplet file");
  app.add_subcommand("cluster", "kernel k-means on a kernel matrix");
  app.add_subcommand("pca", "kernel PCA on a kernel matrix");
  app.add_subcommand("linkage", "complete-linkage clustering on a kernel matrix");
  app.add_subcommand("experiment", "purity over a fraction x errprob grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error code=" << to_string(Errc::InvalidArgument) << " objects= message=" << e.what() << '\n';
    return 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::map<std::string, std::string> flags;
    for (const auto& [key, option] : options)
      if (option->count() > 0) flags[key] = raw[key];
    const auto file = config_path.empty() ? std::map<std::string, std::string>{} : read_config_file(config_path);
    const RunConfig cfg = resolve_config(command, file, flags);

    if (command == "gen") cmd_gen(cfg, out);
    else if (command == "kernel") cmd_kernel(cfg, out);
    else if (command == "cluster") cmd_cluster(cfg, out);
    else if (command == "pca") cmd_pca(cfg, out);
    else if (command == "linkage") cmd_linkage(cfg, out);
    else cmd_experiment(cfg, out);
    return 0;
  } catch (const Error& e) {
    std::string objects;
    for (std::size_t k = 0; k < e.objects().size(); ++k) objects += (k ? "," : "") + std::to_string(e.objects()[k]);
    std::string message = e.what();
    for (char& c : message)
      if (c == '\n' || c == '\r') c = ' ';
    if (e.code() == Errc::NotPsd)
      message += " (hint: rebuild the kernel with --dominance_fix true, or check that the file holds a Gram matrix)";
    err << "error code=" << to_string(e.code()) << " objects=" << objects << " message=" << message << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error code=Internal objects= message=" << e.what() << '\n';
    return 1;
  }
}

}  // namespace tk::cli
