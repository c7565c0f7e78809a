// vescap: virtual-energy-storage capacity pipeline front end.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ves/pipeline.hpp"

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir;
  std::string fill;
  long long seed = -1;
};

ves::RunConfig make_config(const Cli& cli) {
  ves::RunConfig cfg = cli.config_path.empty() ? ves::default_config()
                                               : ves::load_config(cli.config_path);
  // flags override the config file
  if (cli.seed >= 0) cfg.seed = static_cast<std::uint64_t>(cli.seed);
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (!cli.fill.empty()) {
    if (cli.fill == "linear")
      cfg.fill_linear = true;
    else if (cli.fill == "none")
      cfg.fill_linear = false;
    else
      throw std::runtime_error("--fill must be 'none' or 'linear'");
  }
  if (const char* env = std::getenv("VESCAP_LOG_EVERY"))
    cfg.solver.log_every = std::atoi(env);
  return cfg;
}

void add_common(CLI::App* sub, Cli& cli) {
  sub->add_option("--config", cli.config_path, "JSON config file");
  sub->add_option("--seed", cli.seed, "RNG seed (overrides config)");
  sub->add_option("--out", cli.out_dir, "output directory (overrides config)");
  sub->add_option("--fill", cli.fill, "gap handling for CSV input: none|linear");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSD-constrained virtual-energy-storage capacity of flexible-load ensembles"};
  app.require_subcommand(1);

  Cli cli;
  CLI::App* est = app.add_subcommand("estimate", "Welch estimate + ARMA fit of the net-demand spectrum");
  CLI::App* proj = app.add_subcommand("project", "band-pass, project onto the constraint set, capacity indices");
  CLI::App* verify = app.add_subcommand("verify", "project, then Monte-Carlo check of the QoS guarantees");
  CLI::App* sweep = app.add_subcommand("sweep", "capacity indices against the fleet size");
  CLI::App* all = app.add_subcommand("all", "full pipeline");
  for (CLI::App* sub : {est, proj, verify, sweep, all}) add_common(sub, cli);

  CLI11_PARSE(app, argc, argv);

  try {
    const ves::RunConfig cfg = make_config(cli);
    int code = 0;
    nlohmann::json doc;
    if (est->parsed())
      doc = ves::cmd_estimate(cfg);
    else if (proj->parsed())
      doc = ves::cmd_project(cfg, &code);
    else if (verify->parsed())
      doc = ves::cmd_verify(cfg, &code);
    else if (sweep->parsed())
      doc = ves::cmd_sweep(cfg, &code);
    else
      doc = ves::cmd_all(cfg, &code);
    std::cout << doc.dump(2) << std::endl;
    return code;
  } catch (const std::exception& e) {
    std::cerr << "vescap: " << e.what() << std::endl;
    return 1;
  }
}
