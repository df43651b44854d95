#include <cstdio>
#include <exception>

#include "freemax/harness/config.hpp"
#include "freemax/harness/experiments.hpp"

// Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.
int main(int argc, char** argv) {
  using namespace freemax::harness;
  try {
    const auto cfg = parse_config(argc, argv);
    if (!cfg) return 0;  // help
    const RunManifest manifest = run(*cfg);
    return manifest.all_pass() ? 0 : 1;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "freemax: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "freemax: error: %s\n", e.what());
    return 2;
  }
}
