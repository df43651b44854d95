#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace freemax::harness {

// malformed command line / config file; the CLI maps this to exit code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::string dist;
  std::string dist2;
  std::vector<long long> n_list{2};  // N; a list for spectral-convergence
  long long oracle_k = 2000;         // k
  long long parts = 2;               // p
  long long draws = 10000;
  std::uint64_t seed = 1;
  long long grid = 10000;
  std::string out_dir = "out";
  std::string in_path;  // density-eval input table
  // key -> "flag" | "file" | "default"
  std::map<std::string, std::string> provenance;
};

const std::vector<std::string>& experiment_names();

// CLI flags override config-file values; unknown config keys are rejected.
// Returns nullopt when help was requested (nothing to run).
std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv);

}  // namespace freemax::harness
