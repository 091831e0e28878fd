#pragma once

// Estimands as ratio functionals N(G)/D(G) with weight functions over folded atoms.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "tiltci/priors.hpp"

namespace tiltci {

enum class EstimandId {
  marginal,
  marginal_norm,
  power_bin,
  power_ge80,
  sign_agreement,
  sym_post_mean,
  repl_prob,
  future_coverage,
  effect_repl,
  prob_nonsig,
  omega,
  // Not part of the analyze surface; used by the count-data module.
  poisson_post_mean,
};

std::string to_string(EstimandId id);
EstimandId parse_estimand(const std::string& text);
/// True for estimands that take an evaluation point z.
bool takes_z(EstimandId id);

struct RatioFunctional {
  EstimandId id;
  std::optional<double> z;
  WeightFn nu;
  WeightFn delta;
  std::string description;
};

struct Interval {
  double lo;
  double hi;
};

/// Signed-prior weight (nu(u) + nu(-u)) / 2.
WeightFn symmetrize(WeightFn signed_fn);

RatioFunctional make_marginal_density(double z);
RatioFunctional make_normalized_marginal(double z, const SelectionRegion& region);
/// P_G[beta(mu) in I]; I is closed unless lower_open is set.
RatioFunctional make_power_bin(Interval bin, bool lower_open = false);
RatioFunctional make_power_ge80();
RatioFunctional make_sign_agreement(double z);
RatioFunctional make_symmetrized_posterior_mean(double z);
RatioFunctional make_replication_prob(double z);
RatioFunctional make_future_coverage(double z);
RatioFunctional make_effect_size_repl(double z);
RatioFunctional make_prob_nonsig();

/// Dispatch by id. omega has no single functional and is rejected here.
RatioFunctional make_estimand(EstimandId id, std::optional<double> z, const SelectionRegion& region,
                              Interval power_bin = {0.8, 1.0});

double evaluate_plugin(const AtomizedPrior& g, const RatioFunctional& f);
double evaluate_plugin(const PriorDictionary& dict, std::span<const double> pi, const RatioFunctional& f);

/// Wald interval for the significant fraction among published results, mapped through p/(1-p).
Interval omega1_wald(std::int64_t n_sig, std::int64_t n_published, double level = 0.975);
/// Maps an interval for P_G[|Z| < 1.96] to one for omega2 = p/(1-p).
Interval omega2_from_nonsig(Interval p_nonsig);

struct OmegaResult {
  Interval omega1;
  Interval omega2;
  Interval omega;
  std::int64_t n_published = 0;
  double p_hat = 0.0;
};

OmegaResult combine_omega(Interval omega1, Interval omega2);

}  // namespace tiltci
