#include "tiltci/tilting.hpp"

#include <cmath>
#include <numeric>

#include "tiltci/errors.hpp"

namespace tiltci {

namespace {

std::vector<double> normalized(std::vector<double> w, ErrorKind kind, const char* what) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) fail(kind, what);
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

TiltedPrior::TiltedPrior(std::vector<double> support, std::vector<double> tilted_weights)
    : support_(std::move(support)), weights_(std::move(tilted_weights)) {
  if (support_.size() != weights_.size() || support_.empty())
    fail(ErrorKind::config, "tilted prior: support/weights size mismatch or empty");
}

TiltedPrior tilt_prior(const AtomizedPrior& g, const SelectionRegion& region) {
  std::vector<double> w(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) w[k] = g.weights()[k] * region.probability(g.support()[k]);
  return TiltedPrior(g.support(), normalized(std::move(w), ErrorKind::degenerate,
                                             "tilt_prior: prior has zero selection mass"));
}

AtomizedPrior untilt_prior(const TiltedPrior& tg, const SelectionRegion& region) {
  std::vector<double> w(tg.size());
  for (std::size_t k = 0; k < tg.size(); ++k) {
    double wt = tg.weights()[k];
    if (wt == 0.0) continue;
    double p = region.probability(tg.support()[k]);
    if (!(p > 0.0)) fail(ErrorKind::inversion, "untilt_prior: positive tilted weight on an unselectable atom");
    w[k] = wt / p;
  }
  w = normalized(std::move(w), ErrorKind::inversion, "untilt_prior: empty tilted prior");
  return AtomizedPrior(tg.support(), std::move(w));
}

void MixtureWeights::validate(double tol) const {
  if (pi.empty()) fail(ErrorKind::config, "mixture weights: empty");
  double total = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) fail(ErrorKind::config, "mixture weights: negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) fail(ErrorKind::config, "mixture weights: not on the simplex");
}

std::vector<double> map_weights(std::span<const double> pi, std::span<const double> sel_probs,
                                MapDirection dir) {
  if (pi.size() != sel_probs.size()) fail(ErrorKind::config, "map_weights: length mismatch");
  std::vector<double> out(pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (pi[j] == 0.0) continue;
    if (!(sel_probs[j] > 0.0))
      fail(ErrorKind::inversion, "map_weights: positive weight on an element with zero selection probability");
    out[j] = dir == MapDirection::to_tilted ? pi[j] * sel_probs[j] : pi[j] / sel_probs[j];
  }
  return normalized(std::move(out), ErrorKind::inversion, "map_weights: zero total weight");
}

MixtureWeights map_weights(const MixtureWeights& w, const PriorDictionary& dict, MapDirection dir) {
  w.validate();
  if (w.pi.size() != dict.size()) fail(ErrorKind::config, "map_weights: dictionary size mismatch");
  auto expected = dir == MapDirection::to_tilted ? WeightSpace::original : WeightSpace::tilted;
  if (w.space != expected) fail(ErrorKind::config, "map_weights: weights already in the target space");
  return {map_weights(w.pi, dict.selection_probs(), dir),
          dir == MapDirection::to_tilted ? WeightSpace::tilted : WeightSpace::original};
}

double marginal_A(const AtomizedPrior& g, double z, const SelectionRegion& region) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double u = g.support()[k], w = g.weights()[k];
    num += w * folded_density(z, u);
    den += w * region.probability(u);
  }
  if (!(den > 0.0)) fail(ErrorKind::degenerate, "marginal_A: prior has zero selection mass");
  return region.contains(z) ? num / den : 0.0;
}

double marginal_B(const TiltedPrior& tg, double z, const SelectionRegion& region) {
  double total = 0.0;
  for (std::size_t k = 0; k < tg.size(); ++k) {
    double w = tg.weights()[k];
    if (w == 0.0) continue;
    double p = region.probability(tg.support()[k]);
    if (!(p > 0.0)) fail(ErrorKind::degenerate, "marginal_B: positive weight on an unselectable atom");
    total += w * folded_density(z, tg.support()[k]) / p;
  }
  return region.contains(z) ? total : 0.0;
}

double tilted_functional(const TiltedPrior& tg, const WeightFn& nu, const WeightFn& delta,
                         const SelectionRegion& region) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < tg.size(); ++k) {
    double w = tg.weights()[k];
    if (w == 0.0) continue;
    double u = tg.support()[k];
    double p = region.probability(u);
    if (!(p > 0.0)) fail(ErrorKind::degenerate, "tilted_functional: positive weight on an unselectable atom");
    num += w * nu(u) / p;
    den += w * delta(u) / p;
  }
  if (den == 0.0 || !std::isfinite(den)) fail(ErrorKind::undefined, "tilted_functional: zero denominator");
  return num / den;
}

double tilted_functional(const PriorDictionary& dict, std::span<const double> pi_tilde,
                         const WeightFn& nu, const WeightFn& delta) {
  if (pi_tilde.size() != dict.size()) fail(ErrorKind::config, "tilted_functional: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (pi_tilde[j] == 0.0) continue;
    double p = dict.selection_probs()[j];
    num += pi_tilde[j] * prior_integral(dict[j], nu) / p;
    den += pi_tilde[j] * prior_integral(dict[j], delta) / p;
  }
  if (den == 0.0 || !std::isfinite(den)) fail(ErrorKind::undefined, "tilted_functional: zero denominator");
  return num / den;
}

}  // namespace tiltci
