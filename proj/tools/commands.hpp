#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tiltci::cli {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kSolver = 4 };

struct IngestOptions {
  std::string input;
  std::string out;
  std::uint64_t seed = 1;
  double s_lower = 2.1;
  std::string region;  // overrides s_lower when set
  double ci_level = 0.95;
};

struct AnalyzeOptions {
  std::string zscores;
  std::string report;
  std::string estimand;
  std::string prior_class = "sn";
  double alpha = 0.05;
  std::vector<double> z;
  std::string z_grid;
  double s_lower = 2.1;
  std::string region;
  std::string power_bin = "0.8:1";
  int grid_points = 1000;
  int atoms = 512;
  int loc_atoms = 64;
  std::string out;
};

struct SimulateOptions {
  std::string config;
  std::string out;
  std::int64_t n_all = 10000;
  int n_reps = 200;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::vector<double> prior_support{0, 1, 2, 3, 4, 5, 6};
  std::vector<double> prior_weights;
  std::string pub_region = "1.96:6";
  double pub_inside = 1.0;
  double pub_outside = 0.0;
  std::string region = "1.96:6";
  std::vector<std::string> estimands{"marginal_norm"};
  std::string z_grid = "0:6:13";
  std::string prior_class = "zcurve";
  std::vector<std::string> methods{"floc", "bootstrap"};
  int bootstrap_b = 500;
  int bootstrap_max_iter = 1000;
  int em_max_iter = 10000;
  double em_tol = 1e-8;
  int grid_points = 1000;
};

struct ButterflyOptions {
  std::string counts;
  double alpha = 0.05;
  int z_max = 10;
  int support_points = 400;
  std::string out;
};

struct GlobalOptions {
  unsigned threads = 0;
  std::vector<std::string> argv;
};

int cmd_ingest(const IngestOptions& o, const GlobalOptions& g);
int cmd_analyze(const AnalyzeOptions& o, const GlobalOptions& g);
int cmd_simulate(const SimulateOptions& o, const GlobalOptions& g);
int cmd_butterfly(const ButterflyOptions& o, const GlobalOptions& g);

/// "a:b:n" -> n equispaced points from a to b inclusive.
std::vector<double> parse_z_grid(const std::string& text);

}  // namespace tiltci::cli
