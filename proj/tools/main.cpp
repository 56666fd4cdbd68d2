#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cmpgeo/experiment.hpp"

namespace {

using namespace cmpgeo::cli;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << text;
  f.close();
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmpgeo: comparison geometry experiments"};
  std::string config_path, out_path, format;
  std::optional<long long> steps;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_path, "output path ('-' for standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--steps", steps, "override params.steps");
  app.add_option("--tol", tol, "override params.tol");
  app.add_option("--seed", seed, "override the seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  ExperimentConfig cfg;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return kExitInputError;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
    apply_overrides(cfg, steps, tol, seed);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
  if (!out_path.empty()) cfg.output = out_path;
  if (!format.empty()) cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;

  const ExperimentResult res = run_experiment(cfg);
  const std::string summary = res.summary.dump(2) + "\n";
  if (res.exit_code == kExitInputError) std::cerr << "error: " << res.summary.value("error", "") << "\n";

  const std::string& primary = cfg.format == OutputFormat::json ? summary : res.csv;
  if (cfg.output == "-") {
    std::cout << primary;
    std::cout.flush();
    if (!std::cout) return kExitInputError;
  } else {
    bool ok = write_file(cfg.output, primary);
    if (ok && cfg.format == OutputFormat::csv) ok = write_file(cfg.output + ".summary.json", summary);
    if (!ok) {
      std::cerr << "error: cannot write '" << cfg.output << "'\n";
      return kExitInputError;
    }
  }
  return res.exit_code;
}
