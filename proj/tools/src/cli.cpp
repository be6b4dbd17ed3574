#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "pba/error.hpp"
#include "pba_app/analysis.hpp"
#include "pba_app/export.hpp"

namespace pba::app {

namespace {

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used, 10);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument,
              source + " must be a non-negative integer, got '" + text + "'");
}

int run_command(const std::string& config_path,
                const std::optional<std::string>& seed_flag,
                const std::optional<int>& threads, const std::string& out) {
  const ModelRegistry registry = ModelRegistry::builtin();
  const AnalysisConfig cfg = load_config(config_path, registry);
  RunOptions opt;
  if (seed_flag) {
    opt.seed = parse_seed(*seed_flag, "--seed");
  } else if (const char* env = std::getenv("PBA_SEED"); env && *env) {
    opt.seed = parse_seed(env, "PBA_SEED");
  }
  opt.threads = threads;
  opt.out_dir = out;
  const RunReport rep = run_analysis(cfg, opt);
  std::cout << "wrote " << (opt.out_dir / "summary.json").string() << " ("
            << rep.seconds << " s)\n";
  return 0;
}

int pbox_command(double min, double max, std::optional<double> median,
                 std::optional<double> mean, std::optional<double> sd,
                 int grid, const std::string& out) {
  if (median && mean && sd) {
    // No single constructor: intersect the median+mean and mean+sd boxes.
    const PBox parts[2] = {
        build_pbox(MinMaxMedianMean{min, max, *median, *mean}),
        build_pbox(MinMaxMeanStd{min, max, *mean, *sd})};
    export_curve(intersect_pboxes(parts), grid, out);
  } else {
    export_curve(build_pbox(make_minimal_data(min, max, median, mean, sd)),
                 grid, out);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Probability bounds analysis from minimal data"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an analysis config");
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<int> threads;
  std::string out_dir = ".";
  run->add_option("config", config_path, "Config file (JSON)")->required();
  run->add_option("--seed", seed, "Random seed (overrides PBA_SEED and config)");
  run->add_option("--threads", threads, "Worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory");

  auto* pbox = app.add_subcommand("pbox", "Export a p-box curve");
  double min = 0, max = 0;
  std::optional<double> median, mean, sd;
  int grid = 201;
  std::string out_file;
  pbox->add_option("--min", min, "Minimum")->required();
  pbox->add_option("--max", max, "Maximum")->required();
  pbox->add_option("--median", median, "Median");
  pbox->add_option("--mean", mean, "Mean");
  pbox->add_option("--std", sd, "Standard deviation");
  pbox->add_option("--grid", grid, "Number of curve points")->required();
  pbox->add_option("--out", out_file, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return run_command(config_path, seed, threads, out_dir);
    return pbox_command(min, max, median, mean, sd, grid, out_file);
  } catch (const std::exception& e) {
    std::cerr << error_record(e).dump() << '\n';
    return 1;
  }
}

}  // namespace pba::app
