#pragma once

// F-Localization: a DKW band around the truncated empirical CDF, and the
// linear program bounding a ratio functional over all tilted mixtures in the band.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiltci/estimands.hpp"
#include "tiltci/priors.hpp"

namespace tiltci {

struct TruncatedSample {
  std::vector<double> values;  // sorted, all inside region
  SelectionRegion region;

  /// Sorts and validates; throws a domain error for values outside the region.
  static TruncatedSample make(std::vector<double> abs_values, SelectionRegion region);
  std::size_t n() const { return values.size(); }
};

/// Grid from min to max with interior empirical quantiles; ties collapsed.
std::vector<double> build_grid(std::span<const double> sorted_values, int points = 1000);
std::vector<double> build_grid(const TruncatedSample& sample, int points = 1000);

double dkw_radius(std::size_t n, double alpha);

/// Fraction of sorted values <= s, for each grid point.
std::vector<double> empirical_cdf(std::span<const double> sorted_values, std::span<const double> grid);

struct ColumnPair {
  std::vector<double> numer;
  std::vector<double> denom;
};

class FLocProblem {
 public:
  /// Generic form. cdf is row-major K x L: cdf[j*L + l] = P_{G_j}[|Z| <= s_l | selected].
  FLocProblem(std::vector<double> grid, std::vector<double> ecdf, std::size_t n, double alpha,
              std::vector<double> cdf, std::vector<AtomizedPrior> elements, std::vector<double> sel_probs,
              std::string prior_class);

  /// Folded-normal problem from a dictionary and a truncated sample.
  static FLocProblem build(const PriorDictionary& dict, const TruncatedSample& sample, double alpha,
                           int grid_points = 1000);

  std::size_t K() const { return sel_probs_.size(); }
  std::size_t L() const { return grid_.size(); }
  double alpha() const { return alpha_; }
  double radius() const { return radius_; }
  std::size_t n() const { return n_; }
  const std::string& prior_class() const { return prior_class_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& ecdf() const { return ecdf_; }
  double cdf(std::size_t j, std::size_t l) const { return cdf_[j * grid_.size() + l]; }
  const std::vector<double>& selection_probs() const { return sel_probs_; }
  const std::vector<AtomizedPrior>& elements() const { return elements_; }
  /// Selection region for folded-normal problems; empty for count data.
  const std::optional<SelectionRegion>& region() const { return region_; }

  /// numer_j = int nu dG_j / P_j and denom_j = int delta dG_j / P_j.
  ColumnPair columns(const RatioFunctional& f) const;

  /// Same data with a different level (radius recomputed).
  FLocProblem with_alpha(double alpha) const;

  /// sup_l |F_pi(s_l) - Fhat(s_l)| for tilted weights pi.
  double band_distance(std::span<const double> pi_tilde) const;

 private:
  std::vector<double> grid_, ecdf_;
  std::size_t n_;
  double alpha_, radius_;
  std::vector<double> cdf_;
  std::vector<AtomizedPrior> elements_;
  std::vector<double> sel_probs_;
  std::string prior_class_;
  std::optional<SelectionRegion> region_;
};

struct IntervalResult {
  std::string estimand;
  std::optional<double> z;
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  std::string prior_class;
  std::string method = "floc";
  std::string status = "optimal";
  int lp_variables = 0;
  int lp_constraints = 0;
  long pivots = 0;
  /// Tilted weights attaining the bounds (empty when not optimal).
  std::vector<double> argmin, argmax;
};

/// Bounds for the ratio sum(numer*x)/sum(denom*x) over the band. Throws an
/// empty_localization error when no mixture fits the band.
IntervalResult solve_bounds(const FLocProblem& problem, const ColumnPair& cols);
IntervalResult solve_bounds(const FLocProblem& problem, const RatioFunctional& f);

/// One interval per z; per-point failures are recorded in the status field.
std::vector<IntervalResult> floc_band(const FLocProblem& problem, EstimandId id, std::span<const double> z_grid,
                                      unsigned threads = 0);

/// omega = omega1 * omega2 at overall level 1 - alpha: a Wald interval for
/// omega1 and a FLOC interval for P_G[|Z| < 1.96] at alpha / 2 each.
OmegaResult floc_omega(const FLocProblem& problem, std::int64_t n_sig, std::int64_t n_published);

std::string intervals_to_csv(const std::vector<IntervalResult>& rows);
std::string intervals_to_json(const std::vector<IntervalResult>& rows);

}  // namespace tiltci
