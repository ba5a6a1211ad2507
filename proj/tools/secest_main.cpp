#include <string>

#include <CLI11.hpp>

#include "secest/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"secure state estimation under sensor attacks"};
  app.require_subcommand(1);

  std::string config_path;
  secest::cli::RunFlags flags;
  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub, bool with_tol) {
    sub->add_option("--config", config_path, "scenario config file")->required();
    auto* out_opt = sub->add_option("--out", out_dir, "output directory (overrides the config)");
    auto* seed_opt = sub->add_option("--seed", seed, "seed override");
    sub->add_flag("--no-plots", flags.no_plots, "skip plot generation");
    CLI::Option* tol_opt = nullptr;
    if (with_tol) tol_opt = sub->add_option("--tol", tol, "certificate tolerance override");
    sub->callback([&flags, out_opt, seed_opt, tol_opt, &out_dir, &seed, &tol]() {
      if (out_opt->count()) flags.out = out_dir;
      if (seed_opt->count()) flags.seed = seed;
      if (tol_opt && tol_opt->count()) flags.tol = tol;
    });
  };

  auto* synth = app.add_subcommand("synthesize", "synthesize observer gains for all index sets");
  add_common(synth, true);
  auto* run = app.add_subcommand("run", "run the scenario and emit trace, report and plots");
  add_common(run, true);
  auto* check = app.add_subcommand("check", "run the scenario checks without writing artifacts");
  add_common(check, true);
  auto* report = app.add_subcommand("report", "regenerate plots and summary from a written trace");
  add_common(report, false);

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) return secest::cli::cmd_synthesize(config_path, flags);
  if (run->parsed()) return secest::cli::cmd_run(config_path, flags);
  if (check->parsed()) return secest::cli::cmd_check(config_path, flags);
  if (report->parsed()) return secest::cli::cmd_report(config_path, flags);
  return 1;
}
