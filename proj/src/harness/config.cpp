#include "freemax/harness/config.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <set>

namespace freemax::harness {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "conv-demo",   "matrix-max", "limit-sampler-check", "semigroup",
      "spectral-convergence", "max-stable", "max-id", "doa", "density-eval"};
  return names;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {"experiment", "dist", "dist2", "N", "k",
                                             "p", "draws", "seed", "grid", "out", "in"};
  return keys;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config file " + path + ": expected key=value, got `" + t + "`");
    const std::string key = trim(t.substr(0, eq));
    if (!known_keys().count(key))
      throw UsageError("config file " + path + ": unknown key `" + key + "`");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

long long parse_count(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || v < 1)
    throw UsageError("option " + key + ": expected a positive integer, got `" + value + "`");
  return v;
}

std::uint64_t parse_seed(const std::string& value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw UsageError("option seed: expected an unsigned integer, got `" + value + "`");
  return v;
}

std::vector<long long> parse_n_list(const std::string& value) {
  std::vector<long long> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i == value.size() || value[i] == ',') {
      out.push_back(parse_count("N", trim(value.substr(start, i - start))));
      start = i + 1;
    }
  }
  if (out.empty()) throw UsageError("option N: empty list");
  return out;
}

}  // namespace

std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv) {
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      config_path = a.substr(9);
  }
  std::map<std::string, std::string> file_kv;
  if (!config_path.empty()) file_kv = load_config_file(config_path);

  CLI::App app{"freemax: extremal-convolution and random-matrix experiments"};
  app.name("freemax");
  std::string experiment, dist, dist2, n_spec, k_spec, p_spec, draws_spec, seed_spec,
      grid_spec, out_dir, in_path, config_dummy;
  app.add_option("experiment,--experiment", experiment,
                 "one of: conv-demo matrix-max limit-sampler-check semigroup "
                 "spectral-convergence max-stable max-id doa density-eval");
  app.add_option("--dist", dist, "distribution spec, e.g. uniform(0,1)");
  app.add_option("--dist2", dist2, "second distribution spec");
  app.add_option("--N", n_spec, "matrix dimension(s), comma separated");
  app.add_option("--k", k_spec, "oracle steps");
  app.add_option("--p", p_spec, "parts for max-stable / max-id splits");
  app.add_option("--draws", draws_spec, "Monte Carlo draw count");
  app.add_option("--seed", seed_spec, "64-bit seed");
  app.add_option("--grid", grid_spec, "evaluation grid size");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--in", in_path, "input CSV (density-eval)");
  app.add_option("--config", config_dummy, "flat key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::puts(app.help().c_str());
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ExperimentConfig cfg;
  auto resolve = [&](const char* key, const std::string& flag_value, bool flag_present,
                     auto&& apply) {
    if (flag_present) {
      apply(flag_value);
      cfg.provenance[key] = "flag";
    } else if (file_kv.count(key)) {
      apply(file_kv.at(key));
      cfg.provenance[key] = "file";
    } else {
      cfg.provenance[key] = "default";
    }
  };

  resolve("experiment", experiment, app.count("--experiment") || app.count("experiment"),
          [&](const std::string& v) { cfg.experiment = v; });
  resolve("dist", dist, app.count("--dist"), [&](const std::string& v) { cfg.dist = v; });
  resolve("dist2", dist2, app.count("--dist2"),
          [&](const std::string& v) { cfg.dist2 = v; });
  resolve("N", n_spec, app.count("--N"),
          [&](const std::string& v) { cfg.n_list = parse_n_list(v); });
  resolve("k", k_spec, app.count("--k"),
          [&](const std::string& v) { cfg.oracle_k = parse_count("k", v); });
  resolve("p", p_spec, app.count("--p"),
          [&](const std::string& v) { cfg.parts = parse_count("p", v); });
  resolve("draws", draws_spec, app.count("--draws"),
          [&](const std::string& v) { cfg.draws = parse_count("draws", v); });
  resolve("seed", seed_spec, app.count("--seed"),
          [&](const std::string& v) { cfg.seed = parse_seed(v); });
  resolve("grid", grid_spec, app.count("--grid"),
          [&](const std::string& v) { cfg.grid = parse_count("grid", v); });
  resolve("out", out_dir, app.count("--out"),
          [&](const std::string& v) { cfg.out_dir = v; });
  resolve("in", in_path, app.count("--in"), [&](const std::string& v) { cfg.in_path = v; });

  if (cfg.experiment.empty()) {
    std::string msg = "missing experiment; expected one of:";
    for (const auto& n : experiment_names()) msg += " " + n;
    throw UsageError(msg);
  }
  bool known = false;
  for (const auto& n : experiment_names()) known = known || n == cfg.experiment;
  if (!known) {
    std::string msg = "unknown experiment `" + cfg.experiment + "`; expected one of:";
    for (const auto& n : experiment_names()) msg += " " + n;
    throw UsageError(msg);
  }
  return cfg;
}

}  // namespace freemax::harness
