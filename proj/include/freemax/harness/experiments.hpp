#pragma once

#include <string>
#include <vector>

#include "freemax/harness/config.hpp"

namespace freemax::harness {

struct CheckResult {
  std::string name;
  std::string criterion;  // the threshold, echoed so it is never hidden
  double value = 0;
  bool pass = false;
};

struct RunManifest {
  std::string experiment;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;  // files written, relative to out_dir
  double wall_ms = 0;
  bool all_pass() const;
};

// Executes the experiment: writes CSVs, a gnuplot script and manifest.json
// under cfg.out_dir, prints one PASS/FAIL line per check, and returns the
// manifest. Identical configs (and any FREEMAX_THREADS) give byte-identical
// CSVs.
RunManifest run(const ExperimentConfig& cfg);

// FREEMAX_THREADS cap if set, hardware concurrency otherwise; >= 1.
int thread_count();

}  // namespace freemax::harness
