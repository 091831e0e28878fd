#pragma once

// Finite prior dictionaries. Every element is stored as the folded distribution
// |mu| represented by weighted atoms on [0, inf).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tiltci/kernel.hpp"

namespace tiltci {

enum class PriorClass { scale_normal, unimodal, all, zcurve };

std::string to_string(PriorClass cls);
/// Accepts the long names and the CLI short forms sn, unm, all, zcurve.
PriorClass parse_prior_class(const std::string& text);

struct PriorClassSpec {
  PriorClass cls = PriorClass::scale_normal;
  double sigma_min = 0.001;
  double sigma_max = 100.0;
  double gamma = 1.2;
  double a_min = 0.001;
  double a_max = 100.0;
  double loc_max = 12.0;
  double loc_std = 0.05;
  int atom_count = 512;      // atoms per scale / uniform element
  int loc_atom_count = 64;   // atoms per narrow location element of G^all

  static PriorClassSpec defaults(PriorClass cls);
  void validate() const;
  /// Stable text form used for hashing and manifests.
  std::string canonical() const;
};

/// Geometric grid min * gamma^(i-1), ending at the first value >= max.
std::vector<double> geometric_grid(double min, double max, double gamma);

class AtomizedPrior {
 public:
  AtomizedPrior() = default;
  /// Sorts atoms by location; weights must be nonnegative and sum to one.
  AtomizedPrior(std::vector<double> support, std::vector<double> weights, std::string label = {});

  static AtomizedPrior point_mass(double at, std::string label = {});

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }
  const std::string& label() const { return label_; }

  /// Per-atom selection probabilities; empty until attach_region is called.
  const std::vector<double>& atom_selection() const { return atom_sel_; }
  /// sum_k w_k * Phi(S; u_k) for the attached region.
  double selection_mass() const { return sel_mass_; }
  void attach_region(const SelectionRegion& region);

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
  std::string label_;
  std::vector<double> atom_sel_;
  double sel_mass_ = 0.0;
};

// Continuous element shapes that atomize() can quantize.
struct PointMass { double at; };
struct CenteredNormal { double sigma; };
struct CenteredUniform { double half_width; };
struct LocatedNormal { double mean; double sd; };
struct GammaShape { double shape; double rate; };  // positive support, fold is identity

using ElementShape = std::variant<PointMass, CenteredNormal, CenteredUniform, LocatedNormal, GammaShape>;

/// Midpoint-quantile quantization: atoms at the (k - 1/2)/M quantiles of the
/// folded distribution, weight 1/M each. Point masses pass through.
AtomizedPrior atomize(const ElementShape& shape, int m);

class PriorDictionary {
 public:
  PriorDictionary(std::vector<AtomizedPrior> elements, PriorClassSpec spec, SelectionRegion region);

  const std::vector<AtomizedPrior>& elements() const { return elements_; }
  const AtomizedPrior& operator[](std::size_t j) const { return elements_[j]; }
  std::size_t size() const { return elements_.size(); }
  const PriorClassSpec& spec() const { return spec_; }
  const SelectionRegion& region() const { return region_; }
  /// P_{G_j}[|Z| in S] per element.
  const std::vector<double>& selection_probs() const { return sel_probs_; }

 private:
  std::vector<AtomizedPrior> elements_;
  PriorClassSpec spec_;
  SelectionRegion region_;
  std::vector<double> sel_probs_;
};

PriorDictionary build_dictionary(const PriorClassSpec& spec, const SelectionRegion& region);

using WeightFn = std::function<double(double)>;

/// sum_k w_k * psi(u_k). Throws a numeric error naming the atom if psi is not finite.
double prior_integral(const AtomizedPrior& g, const WeightFn& psi);

/// Collapses mixture weights over a dictionary into one atom list.
AtomizedPrior mix(const PriorDictionary& dict, std::span<const double> pi);

}  // namespace tiltci
