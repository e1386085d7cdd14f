#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "greenflow/greenflow.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string table3;
  std::string table4;
  std::string model;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t n_synthetic = 0;
  std::size_t epochs = 0;
};

greenflow::RunConfig resolve_config(const CliOptions& opt) {
  greenflow::RunConfig cfg;
  if (!opt.config_path.empty()) cfg = greenflow::load_config(opt.config_path);
  // flags win over the config file
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (!opt.table3.empty()) cfg.table3_path = opt.table3;
  if (!opt.table4.empty()) cfg.table4_path = opt.table4;
  if (!opt.model.empty()) cfg.model_path = opt.model;
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.n_synthetic > 0) cfg.n_synthetic = opt.n_synthetic;
  if (opt.epochs > 0) cfg.hyper.epochs = opt.epochs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "greenflow: scheduler energy/TAT simulation, physics-informed synthetic "
      "data generation, and frequency-reduction trade-off analysis"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON config file");
  app.add_option("--out-dir", opt.out_dir, "output directory (overrides config)");
  app.add_option("--table3", opt.table3, "base metrics CSV (overrides config)");
  app.add_option("--table4", opt.table4, "reduction metrics CSV (overrides config)");
  app.add_option("--model", opt.model, "model artifact path (overrides config)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "global seed (overrides config)");
  app.add_option("--n-synthetic", opt.n_synthetic, "synthetic records to generate");
  app.add_option("--epochs", opt.epochs, "training epochs (overrides config)");

  using Cmd = void (*)(const greenflow::RunConfig&);
  struct Sub {
    const char* name;
    const char* help;
    Cmd fn;
  };
  const Sub subs[] = {
      {"calibrate", "fit policy parameters to the bundled metric tables", greenflow::cmd_calibrate},
      {"simulate", "emit base-frequency traces from the calibrated model", greenflow::cmd_simulate},
      {"sweep", "emit the full reduction-grid sweep CSV", greenflow::cmd_sweep},
      {"train", "train the physics-informed VAE on the sweep grid", greenflow::cmd_train},
      {"generate", "draw gated synthetic records from the trained model", greenflow::cmd_generate},
      {"validate", "run constraint/consistency/outlier checks on synthetic records",
       greenflow::cmd_validate},
      {"bootstrap", "bootstrap the base-vs-reduced energy difference", greenflow::cmd_bootstrap},
      {"optimize", "pick the sweet-spot reduction per scheduler/workflow pair",
       greenflow::cmd_optimize},
      {"report", "write before/after temperature traces and the thermal summary",
       greenflow::cmd_report},
  };

  Cmd selected = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();  // global flags may follow the subcommand
    sub->callback([&selected, fn = s.fn] { selected = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  opt.seed_set = seed_opt->count() > 0;

  return greenflow::run_command(
      [&] {
        greenflow::RunConfig cfg = resolve_config(opt);
        selected(cfg);
      },
      std::cerr);
}
