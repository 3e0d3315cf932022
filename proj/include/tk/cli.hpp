#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tk/eval.hpp"
#include "tk/kernels.hpp"

namespace tk::cli {

/// Flat key=value settings; '#' starts a comment line. Unknown keys throw
/// InvalidArgument.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Every recognised key with its default value.
const std::map<std::string, std::string>& default_settings();

/// Resolved configuration of one command. Paths that are not set are empty.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> settings;  ///< defaults, then config file, then flags
  std::set<std::string> explicit_keys;          ///< keys set by file or flag

  std::filesystem::path dataset, triplets, kernel, out, timing_out, features_out;
  std::size_t n = 300;
  std::size_t objects = 0;
  std::vector<std::vector<double>> means;
  double stddev = 1.0;
  OracleKind oracle = OracleKind::Euclidean;
  double fraction = 0.1;
  double errprob = 0.0;
  std::uint64_t seed = 1;
  KernelKind kernel_kind = KernelKind::K1;
  double mu1 = 1.0;
  double mu2 = 1.0;
  bool weighted = false;
  bool dominance_fix = true;
  unsigned threads = 1;
  std::size_t clusters = 3;
  std::size_t restarts = 10;
  std::size_t max_iter = 100;
  std::size_t components = 2;
  std::vector<double> fractions;
  std::vector<double> errprobs;
  std::vector<KernelKind> kernels;
  std::size_t repeats = 1;
};

/// Merges the layers and converts every value; throws InvalidArgument on
/// malformed or inconsistent settings (e.g. mu1/mu2 without k3).
RunConfig resolve_config(const std::string& command, const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags);

/// Entry point shared by the tk executable and the tests. Returns the exit
/// status; failures print a single line
///   error code=<Code> objects=<i,j,...> message=<text>
/// on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tk::cli
