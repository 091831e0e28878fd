#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tiltci/parallel.hpp"

using namespace tiltci::cli;

namespace {

void add_simulate_options(CLI::App& sim, SimulateOptions& so) {
  sim.set_config("--config", "", "Simulation config file (key = value)", true);
  sim.allow_config_extras(CLI::config_extras_mode::error);
  sim.add_option("--out", so.out, "Output directory")->required();
  sim.add_option("--n_all", so.n_all)->check(CLI::PositiveNumber);
  sim.add_option("--n_reps", so.n_reps)->check(CLI::PositiveNumber);
  sim.add_option("--alpha", so.alpha)->check(CLI::Range(1e-6, 0.999999));
  sim.add_option("--seed", so.seed);
  sim.add_option("--prior_support", so.prior_support);
  sim.add_option("--prior_weights", so.prior_weights)->required();
  sim.add_option("--pub_region", so.pub_region);
  sim.add_option("--pub_inside", so.pub_inside);
  sim.add_option("--pub_outside", so.pub_outside);
  sim.add_option("--region", so.region);
  sim.add_option("--estimands", so.estimands);
  sim.add_option("--z_grid", so.z_grid);
  sim.add_option("--prior_class", so.prior_class)->check(CLI::IsMember({"sn", "unm", "all", "zcurve"}));
  sim.add_option("--methods", so.methods)->check(CLI::IsMember({"floc", "bootstrap"}));
  sim.add_option("--bootstrap_b", so.bootstrap_b)->check(CLI::Range(2, 1000000));
  sim.add_option("--bootstrap_max_iter", so.bootstrap_max_iter)->check(CLI::NonNegativeNumber);
  sim.add_option("--em_max_iter", so.em_max_iter)->check(CLI::NonNegativeNumber);
  sim.add_option("--em_tol", so.em_tol)->check(CLI::PositiveNumber);
  sim.add_option("--grid_points", so.grid_points)->check(CLI::Range(2, 100000));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence intervals for empirical-Bayes estimands from selectively reported z-scores"};
  app.set_version_flag("--version", std::string(TILTCI_VERSION));
  app.require_subcommand(1);
  GlobalOptions global;
  for (int i = 0; i < argc; ++i) global.argv.emplace_back(argv[i]);
  app.add_option("--threads", global.threads, "Worker thread cap (0 = hardware concurrency)");

  IngestOptions ing;
  auto* ingest = app.add_subcommand("ingest", "Convert a CI corpus to z-scores, dedupe, fold and truncate");
  ingest->add_option("--input", ing.input, "CSV with study_id,lower,upper[,year]")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ing.out, "Output directory")->required();
  ingest->add_option("--seed", ing.seed, "Seed for choosing one record per study id");
  ingest->add_option("--s-lower", ing.s_lower, "Selection region lower bound, region = [s, inf)")
      ->check(CLI::NonNegativeNumber);
  ingest->add_option("--region", ing.region, "Selection region, e.g. 2.1 or 1.96:6 (overrides --s-lower)");
  ingest->add_option("--ci-level", ing.ci_level, "Nominal level of the input intervals")->check(CLI::Range(0.5, 0.9999));

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "F-Localization intervals for one estimand");
  analyze->add_option("--zscores", an.zscores, "z-score CSV from ingest")->required()->check(CLI::ExistingFile);
  analyze->add_option("--report", an.report, "Ingestion report (omega only; defaults to the z-score directory)");
  analyze->add_option("--estimand", an.estimand, "Estimand id")->required();
  analyze->add_option("--prior-class", an.prior_class, "sn | unm | all | zcurve")
      ->check(CLI::IsMember({"sn", "unm", "all", "zcurve"}));
  analyze->add_option("--alpha", an.alpha, "Miscoverage level")->check(CLI::Range(1e-6, 0.999999));
  auto* zopt = analyze->add_option("--z", an.z, "Evaluation point(s)")->check(CLI::NonNegativeNumber);
  analyze->add_option("--z-grid", an.z_grid, "Evaluation grid a:b:n")->excludes(zopt);
  analyze->add_option("--s-lower", an.s_lower, "Selection region lower bound")->check(CLI::NonNegativeNumber);
  analyze->add_option("--region", an.region, "Selection region (overrides --s-lower)");
  analyze->add_option("--power-bin", an.power_bin, "Power interval lo:hi for power_bin");
  analyze->add_option("--grid-points", an.grid_points, "DKW grid size")->check(CLI::Range(2, 100000));
  analyze->add_option("--atoms", an.atoms, "Atoms per scale element")->check(CLI::Range(2, 100000));
  analyze->add_option("--loc-atoms", an.loc_atoms, "Atoms per location element")->check(CLI::Range(2, 100000));
  analyze->add_option("--out", an.out, "Output directory")->required();

  // CLI11 only reads config files attached to the top-level app, so simulate
  // collects its arguments here and parses them with its own app below.
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo coverage of FLOC and the EM bootstrap (see simulate --help)");
  simulate->prefix_command();
  simulate->set_help_flag();

  ButterflyOptions bo;
  auto* butterfly = app.add_subcommand("butterfly", "Posterior-mean intervals for zero-truncated Poisson counts");
  butterfly->add_option("--counts", bo.counts, "CSV count,species_frequency")->required()->check(CLI::ExistingFile);
  butterfly->add_option("--alpha", bo.alpha)->check(CLI::Range(1e-6, 0.999999));
  butterfly->add_option("--z-max", bo.z_max, "Largest count to report")->check(CLI::Range(1, 1000));
  butterfly->add_option("--support-points", bo.support_points)->check(CLI::Range(2, 100000));
  butterfly->add_option("--out", bo.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  tiltci::set_default_threads(global.threads);
  if (*ingest) return cmd_ingest(ing, global);
  if (*analyze) return cmd_analyze(an, global);
  if (*simulate) {
    SimulateOptions so;
    CLI::App sim{"Monte-Carlo coverage of FLOC and the EM bootstrap", "tiltci simulate"};
    add_simulate_options(sim, so);
    auto rest = simulate->remaining();
    std::reverse(rest.begin(), rest.end());
    try {
      sim.parse(rest);
    } catch (const CLI::ParseError& e) {
      int code = sim.exit(e);
      return code == 0 ? kOk : kUsage;
    }
    so.config = sim.get_config_ptr()->as<std::string>();
    return cmd_simulate(so, global);
  }
  if (*butterfly) return cmd_butterfly(bo, global);
  return kUsage;
}
