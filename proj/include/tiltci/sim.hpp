#pragma once

// Monte-Carlo harness: publication-biased data, FLOC coverage, and an
// EM + bootstrap comparator over the support {0, ..., 6}.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tiltci/estimands.hpp"
#include "tiltci/floc.hpp"

namespace tiltci {

/// Publication probability: `inside` on the region, `outside` elsewhere.
struct PublicationRule {
  SelectionRegion region = SelectionRegion::half_line(0.0);
  double inside = 1.0;
  double outside = 0.0;

  double prob(double abs_z) const { return region.contains(abs_z) ? inside : outside; }
};

struct SimConfig {
  AtomizedPrior true_prior = AtomizedPrior::point_mass(0.0);
  PublicationRule publication;
  SelectionRegion region = SelectionRegion::bounded(1.96, 6.0);
  std::int64_t n_all = 10000;
  int n_reps = 200;
  double alpha = 0.05;
  std::vector<EstimandId> estimands{EstimandId::marginal_norm};
  std::vector<double> z_grid;
  std::uint64_t seed = 1;
  PriorClassSpec prior_spec = PriorClassSpec::defaults(PriorClass::zcurve);
  bool run_floc = true;
  bool run_bootstrap = true;
  int bootstrap_b = 500;
  int grid_points = 1000;
  int em_max_iter = 10000;
  double em_tol = 1e-8;
  int bootstrap_max_iter = 1000;  // cap for warm-started refits
  unsigned threads = 0;

  void validate() const;
};

/// Engine for replicate r: seeded with seed ^ r.
std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t rep);

struct Triplet {
  double mu;
  double abs_z;
  int d;
};

std::vector<Triplet> generate(const SimConfig& config, std::mt19937_64& rng);
std::vector<Triplet> generate(const SimConfig& config, std::uint64_t rep = 0);

/// Sorted |Z| with D = 1 inside the region.
std::vector<double> observed_values(const std::vector<Triplet>& data, const SelectionRegion& region);

struct EmFit {
  std::vector<double> weights;  // tilted-space mixture weights over the support
  std::vector<double> loglik;   // log-likelihood before each update and after the last
  int iterations = 0;
  bool converged = false;
};

/// Truncated folded-normal likelihood matrix, row-major n x K.
std::vector<double> truncated_likelihood(std::span<const double> sample, std::span<const double> support,
                                         const SelectionRegion& region);

/// Multinomial-mixture EM for per-unit truncated data. `multiplicity` gives
/// optional per-observation counts (bootstrap resamples); `init` defaults to uniform.
EmFit em_npmle_fit(std::span<const double> sample, std::span<const double> support, const SelectionRegion& region,
                   int max_iter = 10000, double tol = 1e-8, std::span<const double> init = {},
                   std::span<const double> multiplicity = {}, bool trace = true);

/// Z-Curve support {0, ..., 6}.
std::vector<double> zcurve_support();

/// Outward percentile interval of the values (sorted in place).
Interval percentile_interval(std::vector<double>& values, double alpha);

/// Percentile bootstrap for several functionals from one set of resamples.
/// Each resample is refit by EM (warm-started), untilted, and evaluated.
std::vector<Interval> bootstrap_ci(std::span<const double> sample, const std::vector<RatioFunctional>& functionals,
                                   int b, double alpha, std::mt19937_64& rng, const SelectionRegion& region,
                                   int max_iter = 10000, double tol = 1e-8, int refit_max_iter = 1000);

struct CoverageRow {
  std::string estimand;
  std::optional<double> z;
  std::string method;
  double truth = 0.0;
  double coverage = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  /// Fraction of replicates covering every (estimand, z) at once, per method.
  std::vector<std::pair<std::string, double>> simultaneous;
  int n_reps = 0;
  double mean_n_trun = 0.0;

  std::string to_csv() const;
  std::string to_json() const;
};

CoverageReport mc_coverage(const SimConfig& config);

}  // namespace tiltci
