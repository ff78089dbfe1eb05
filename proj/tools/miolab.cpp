// Copyright (c) 2026 miolab contributors
// SPDX-License-Identifier: Apache-2.0
//
// miolab: contrastive-learning laboratory driver. Subcommands cover
// pretraining, linear probing, gradient and bound checking, false-negative
// geometry trials, parameter sweeps, and CSV charting.

#include <cstdio>
#include <cstdlib>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "mio/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"miolab: a desk-scale contrastive learning laboratory"};
  app.require_subcommand(1);

  mio::PretrainOptions pretrain_opt;
  CLI::App* pretrain = app.add_subcommand(
      "pretrain", "Run self-supervised pretraining from a config document");
  pretrain->add_option("--config", pretrain_opt.config_path,
                       "Experiment config (JSON)")
      ->required();
  pretrain->add_option("--out", pretrain_opt.out_dir,
                       "Output directory (overrides the config)");
  pretrain->add_option("--seed", pretrain_opt.seed,
                       "Override the training and probe seeds");

  mio::ProbeOptions probe_opt;
  CLI::App* probe = app.add_subcommand(
      "probe", "Fit a linear probe on frozen encoder features");
  probe->add_option("--config", probe_opt.config_path,
                    "Experiment config (JSON)")
      ->required();
  probe->add_option("--out", probe_opt.out_dir,
                    "Output directory (overrides the config)");
  probe->add_option("--checkpoint", probe_opt.checkpoint_path,
                    "Checkpoint path (default: <out>/checkpoint.json)");
  probe->add_option("--seed", probe_opt.seed, "Override the probe seed");

  mio::GradcheckOptions grad_opt;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "Compare analytic loss gradients to central differences");
  gradcheck->add_option("--loss", grad_opt.loss,
                        "mio | infonce | mio_l2 | all");
  gradcheck->add_option("--mode", grad_opt.mode, "dot | cosine | both");
  gradcheck->add_option("--n", grad_opt.batch_sizes, "Pairs per batch")
      ->delimiter(',');
  gradcheck->add_option("--d", grad_opt.dims, "Feature widths")
      ->delimiter(',');
  gradcheck->add_option("--trials", grad_opt.trials, "Random batches");
  gradcheck->add_option("--tolerance", grad_opt.tolerance,
                        "Max relative error allowed");
  gradcheck->add_option("--step", grad_opt.step, "Finite-difference step");
  gradcheck->add_option("--seed", grad_opt.seed, "Base seed");
  gradcheck->add_option("--out", grad_opt.out_dir,
                        "Optional output directory for gradcheck.csv");

  mio::MiboundOptions mi_opt;
  CLI::App* mibound = app.add_subcommand(
      "mibound", "Verify the loss bound on enumerable discrete joints");
  mibound->add_option("--k", mi_opt.k_list, "Alphabet sizes")->delimiter(',');
  mibound->add_option("--trials", mi_opt.trials, "Dirichlet joints per k");
  mibound->add_option("--seed", mi_opt.seed, "Base seed");
  mibound->add_option("--out", mi_opt.out_dir,
                      "Optional output directory for mibound.csv");

  mio::GeometryOptions geo_opt;
  CLI::App* geometry = app.add_subcommand(
      "geometry", "Monte Carlo false-negative deviation angles");
  geometry->add_option("--eta", geo_opt.eta_list, "False-negative counts")
      ->delimiter(',');
  geometry->add_option("--trials", geo_opt.trials, "Trials per eta");
  geometry->add_option("--sigma", geo_opt.sigma,
                       "Class spread (centroid sits at 10 sigma)");
  geometry->add_option("--seed", geo_opt.seed, "Base seed");
  geometry->add_option("--out", geo_opt.out_dir,
                       "Optional output directory for geometry.csv");

  mio::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Pretrain + probe across one parameter's values");
  sweep->add_option("--config", sweep_opt.spec_path, "Sweep spec (JSON)")
      ->required();
  sweep->add_option("--out", sweep_opt.out_dir,
                    "Output directory (overrides the base config)");
  sweep->add_option("--seed", sweep_opt.seed, "Base seed for child runs");

  mio::PlotOptions plot_opt;
  CLI::App* plot =
      app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  plot->add_option("--csv", plot_opt.csv_path, "Input CSV file")->required();
  plot->add_option("--x", plot_opt.x_column, "X-axis column")->required();
  plot->add_option("--y", plot_opt.y_columns, "Y columns (comma separated)")
      ->required()
      ->delimiter(',');
  plot->add_option("--out", plot_opt.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const int cap = mio::resolve_thread_cap(std::getenv("MIO_LAB_THREADS"));
    if (cap > 0) Eigen::setNbThreads(cap);
  } catch (const mio::Error& e) {
    std::fprintf(stderr, "miolab: %s\n", e.what());
    return 2;
  }

  pretrain_opt.has_seed = pretrain->count("--seed") > 0;
  probe_opt.has_seed = probe->count("--seed") > 0;
  sweep_opt.has_seed = sweep->count("--seed") > 0;

  if (pretrain->parsed()) return mio::cmd_pretrain(pretrain_opt);
  if (probe->parsed()) return mio::cmd_probe(probe_opt);
  if (gradcheck->parsed()) return mio::cmd_gradcheck(grad_opt);
  if (mibound->parsed()) return mio::cmd_mibound(mi_opt);
  if (geometry->parsed()) return mio::cmd_geometry(geo_opt);
  if (sweep->parsed()) return mio::cmd_sweep(sweep_opt);
  if (plot->parsed()) return mio::cmd_plot(plot_opt);
  return 2;
}
