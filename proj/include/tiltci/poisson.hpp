#pragma once

// Zero-truncated Poisson counts: tilting by 1 - exp(-mu) and F-Localization
// for the posterior mean E[mu | Z = z].

#include <string_view>
#include <vector>

#include "tiltci/estimands.hpp"
#include "tiltci/floc.hpp"

namespace tiltci {

double poisson_pmf(int z, double u);
/// 1 - exp(-u): probability that a Poisson(u) count is observed.
double poisson_observed_prob(double u);

/// Throws unless every atom is strictly positive.
void check_poisson_prior(const AtomizedPrior& g);

AtomizedPrior tilt_poisson(const AtomizedPrior& g);
AtomizedPrior untilt_poisson(const AtomizedPrior& tg);

/// End truncation: int pmf dG / int (1 - e^-u) dG, for z = 1..z_max.
std::vector<double> zt_marginal_a(const AtomizedPrior& g, int z_max);
/// Per-unit truncation: int pmf / (1 - e^-u) dG, for z = 1..z_max.
std::vector<double> zt_marginal_b(const AtomizedPrior& g, int z_max);

RatioFunctional poisson_posterior_mean_functional(int z);

/// Log-spaced atoms on [lo, hi], each its own dictionary element.
std::vector<double> poisson_support(int count = 400, double lo = 0.01, double hi = 25.0);

struct CountSample {
  std::vector<double> counts;  // sorted, one entry per species
};

CountSample make_count_sample(std::vector<int> counts);
/// CSV with header count,species_frequency; rejects counts < 1.
CountSample parse_count_csv(std::string_view text);

/// Band at the distinct observed counts; point-mass dictionary over `support`.
FLocProblem build_poisson_problem(const CountSample& sample, double alpha,
                                  const std::vector<double>& support = poisson_support());

}  // namespace tiltci
