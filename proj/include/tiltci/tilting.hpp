#pragma once

// Selective tilting: reweighting priors by their selection probability so that
// end truncation and per-unit truncation produce the same observed law.

#include <span>
#include <vector>

#include "tiltci/priors.hpp"

namespace tiltci {

class TiltedPrior {
 public:
  TiltedPrior(std::vector<double> support, std::vector<double> tilted_weights);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
};

TiltedPrior tilt_prior(const AtomizedPrior& g, const SelectionRegion& region);
AtomizedPrior untilt_prior(const TiltedPrior& tg, const SelectionRegion& region);

enum class WeightSpace { original, tilted };
enum class MapDirection { to_tilted, to_original };

struct MixtureWeights {
  std::vector<double> pi;
  WeightSpace space = WeightSpace::original;

  /// Throws unless pi is a simplex point within tol.
  void validate(double tol = 1e-10) const;
};

MixtureWeights map_weights(const MixtureWeights& w, const PriorDictionary& dict, MapDirection dir);
/// Same map for bare vectors with explicit per-element selection probabilities.
std::vector<double> map_weights(std::span<const double> pi, std::span<const double> sel_probs,
                                MapDirection dir);

/// End-truncation marginal density of |Z| at z; zero outside the region.
double marginal_A(const AtomizedPrior& g, double z, const SelectionRegion& region);
/// Per-unit truncation marginal density of |Z| at z; zero outside the region.
double marginal_B(const TiltedPrior& tg, double z, const SelectionRegion& region);

/// Ratio functional evaluated on the tilted space.
double tilted_functional(const TiltedPrior& tg, const WeightFn& nu, const WeightFn& delta,
                         const SelectionRegion& region);
double tilted_functional(const PriorDictionary& dict, std::span<const double> pi_tilde,
                         const WeightFn& nu, const WeightFn& delta);

}  // namespace tiltci
