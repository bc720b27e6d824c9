#include <cstdlib>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>

#include "swing/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Indexed gas swing valuation and hedge backtests"};
  app.require_subcommand(1);

  std::string config_file;
  std::string archive;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  int threads = 0;
  std::size_t dump_paths = 0;
  std::size_t dump_index = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "optimisation seed (simulation uses seed + 1)");
    sub->add_option("--paths", paths, "path count for optimisation and simulation");
    sub->add_option("--threads", threads, "worker threads (default: OpenMP default)");
    sub->add_option("--out", out_dir, "output directory (overrides SWING_OUT_DIR and the config)");
  };
  auto* validate = app.add_subcommand("validate", "check the configuration and the simulated model");
  auto* price = app.add_subcommand("price", "value the contract and write the policy archive");
  auto* backtest = app.add_subcommand("backtest", "hedge along fresh paths with an archived policy");
  auto* regressors = app.add_subcommand("study-regressors", "value and hedge with each regressor set");
  auto* components = app.add_subcommand("study-components", "hedge subsets of the risk factors");
  auto* frequency = app.add_subcommand("study-frequency", "hedge the index at lower frequencies");
  for (auto* s : {validate, price, backtest, regressors, components, frequency}) common(s);
  price->add_option("--dump-paths", dump_paths, "write the first N optimisation paths to paths.csv");
  price->add_option("--dump-index", dump_index, "write index values of the first N paths to index.csv");
  backtest->add_option("--archive", archive, "policy archive written by price")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    swing::Overrides o;
    o.has_seed = app.get_subcommands().front()->count("--seed") > 0;
    o.seed = seed;
    o.paths = paths;
    if (const char* env = std::getenv("SWING_OUT_DIR")) o.output_dir = env;
    if (!out_dir.empty()) o.output_dir = out_dir;
    const swing::RunConfig cfg = swing::load_config(config_file, o);

    if (*validate) return swing::cmd_validate(cfg, std::cout);
    if (*price) return swing::cmd_price(cfg, std::cout, dump_paths, dump_index);
    if (*backtest) return swing::cmd_backtest(cfg, archive, std::cout);
    if (*regressors) return swing::cmd_study_regressors(cfg, std::cout);
    if (*components) return swing::cmd_study_components(cfg, std::cout);
    if (*frequency) return swing::cmd_study_frequency(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
