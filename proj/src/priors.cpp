#include "tiltci/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "tiltci/errors.hpp"

namespace tiltci {

std::string to_string(PriorClass cls) {
  switch (cls) {
    case PriorClass::scale_normal: return "scale_normal";
    case PriorClass::unimodal: return "unimodal";
    case PriorClass::all: return "all";
    case PriorClass::zcurve: return "zcurve";
  }
  return "?";
}

PriorClass parse_prior_class(const std::string& text) {
  if (text == "sn" || text == "scale_normal") return PriorClass::scale_normal;
  if (text == "unm" || text == "unimodal") return PriorClass::unimodal;
  if (text == "all") return PriorClass::all;
  if (text == "zcurve") return PriorClass::zcurve;
  fail(ErrorKind::config, "unknown prior class '" + text + "'");
}

PriorClassSpec PriorClassSpec::defaults(PriorClass cls) {
  PriorClassSpec spec;
  spec.cls = cls;
  return spec;
}

void PriorClassSpec::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) fail(ErrorKind::config, std::string("prior class spec: ") + msg);
  };
  require(atom_count >= 2, "atom_count must be >= 2");
  switch (cls) {
    case PriorClass::scale_normal:
      require(sigma_min > 0 && sigma_max > sigma_min && gamma > 1, "need 0 < sigma_min < sigma_max, gamma > 1");
      break;
    case PriorClass::unimodal:
      require(a_min > 0 && a_max > a_min && gamma > 1, "need 0 < a_min < a_max, gamma > 1");
      break;
    case PriorClass::all:
      require(sigma_min > 0 && sigma_max > sigma_min && gamma > 1, "need 0 < sigma_min < sigma_max, gamma > 1");
      require(loc_std > 0 && loc_max >= 0, "need loc_std > 0, loc_max >= 0");
      require(loc_atom_count >= 2, "loc_atom_count must be >= 2");
      break;
    case PriorClass::zcurve:
      break;
  }
}

std::string PriorClassSpec::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(cls) << ";sigma=" << sigma_min << ',' << sigma_max << ";gamma=" << gamma
     << ";a=" << a_min << ',' << a_max << ";loc=" << loc_max << ',' << loc_std
     << ";m=" << atom_count << ',' << loc_atom_count;
  return os.str();
}

std::vector<double> geometric_grid(double min, double max, double gamma) {
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double v = min * std::pow(gamma, i);
    grid.push_back(v);
    if (v >= max) break;
  }
  return grid;
}

AtomizedPrior::AtomizedPrior(std::vector<double> support, std::vector<double> weights, std::string label)
    : label_(std::move(label)) {
  if (support.size() != weights.size() || support.empty())
    fail(ErrorKind::config, "atomized prior: support/weights size mismatch or empty");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  double total = 0.0;
  support_.reserve(order.size());
  weights_.reserve(order.size());
  for (auto i : order) {
    if (!(support[i] >= 0.0) || !(weights[i] >= 0.0) || !std::isfinite(support[i]))
      fail(ErrorKind::config, "atomized prior: atoms must be finite, nonnegative, with nonnegative weight");
    support_.push_back(support[i]);
    weights_.push_back(weights[i]);
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::config, "atomized prior: weights do not sum to one");
  for (auto& w : weights_) w /= total;
}

AtomizedPrior AtomizedPrior::point_mass(double at, std::string label) {
  return AtomizedPrior({at}, {1.0}, std::move(label));
}

void AtomizedPrior::attach_region(const SelectionRegion& region) {
  atom_sel_.resize(support_.size());
  sel_mass_ = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    atom_sel_[k] = region.probability(support_[k]);
    sel_mass_ += weights_[k] * atom_sel_[k];
  }
}

namespace {

// Quantile of |N(mean, sd^2)| by bracketing root search on its CDF.
double folded_normal_quantile(double mean, double sd, double p) {
  auto cdf = [&](double t) {
    return normal_prob_between((-t - mean) / sd, (t - mean) / sd) - p;
  };
  double hi = std::abs(mean) + sd;
  while (cdf(hi) < 0) hi *= 2.0;
  boost::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto [a, b] = boost::math::tools::toms748_solve(cdf, 0.0, hi, cdf(0.0), cdf(hi), tol, iters);
  return 0.5 * (a + b);
}

struct Quantizer {
  int m;

  AtomizedPrior operator()(const PointMass& s) const { return AtomizedPrior::point_mass(s.at); }

  AtomizedPrior operator()(const CenteredNormal& s) const {
    return build([&](double p) { return s.sigma * normal_quantile(0.5 * (1.0 + p)); });
  }
  AtomizedPrior operator()(const CenteredUniform& s) const {
    return build([&](double p) { return s.half_width * p; });
  }
  AtomizedPrior operator()(const LocatedNormal& s) const {
    double mean = std::abs(s.mean);
    // Far from zero the fold is numerically the identity.
    if (mean > 40.0 * s.sd) return build([&](double p) { return mean + s.sd * normal_quantile(p); });
    return build([&](double p) { return folded_normal_quantile(mean, s.sd, p); });
  }
  AtomizedPrior operator()(const GammaShape& s) const {
    boost::math::gamma_distribution<double> dist(s.shape, 1.0 / s.rate);
    return build([&](double p) { return boost::math::quantile(dist, p); });
  }

  template <class Q>
  AtomizedPrior build(Q&& quantile) const {
    std::vector<double> u(m), w(m, 1.0 / m);
    for (int k = 0; k < m; ++k) u[k] = quantile((k + 0.5) / m);
    return AtomizedPrior(std::move(u), std::move(w));
  }
};

std::string fmt_label(const char* prefix, double v) {
  std::ostringstream os;
  os << prefix << v;
  return os.str();
}

AtomizedPrior labelled(AtomizedPrior g, std::string label) {
  return AtomizedPrior(g.support(), g.weights(), std::move(label));
}

}  // namespace

AtomizedPrior atomize(const ElementShape& shape, int m) {
  if (m < 2) fail(ErrorKind::config, "atomize: M must be >= 2");
  return std::visit(Quantizer{m}, shape);
}

PriorDictionary::PriorDictionary(std::vector<AtomizedPrior> elements, PriorClassSpec spec,
                                 SelectionRegion region)
    : elements_(std::move(elements)), spec_(spec), region_(std::move(region)) {
  if (elements_.empty()) fail(ErrorKind::config, "prior dictionary: no elements");
  sel_probs_.reserve(elements_.size());
  for (auto& g : elements_) {
    g.attach_region(region_);
    sel_probs_.push_back(g.selection_mass());
  }
}

PriorDictionary build_dictionary(const PriorClassSpec& spec, const SelectionRegion& region) {
  spec.validate();
  std::vector<AtomizedPrior> elements;
  auto add_scale_normals = [&] {
    for (double sigma : geometric_grid(spec.sigma_min, spec.sigma_max, spec.gamma))
      elements.push_back(labelled(atomize(CenteredNormal{sigma}, spec.atom_count), fmt_label("N(0,s) s=", sigma)));
  };
  switch (spec.cls) {
    case PriorClass::scale_normal:
      add_scale_normals();
      break;
    case PriorClass::unimodal:
      for (double a : geometric_grid(spec.a_min, spec.a_max, spec.gamma))
        elements.push_back(labelled(atomize(CenteredUniform{a}, spec.atom_count), fmt_label("U(-a,a) a=", a)));
      break;
    case PriorClass::all: {
      add_scale_normals();
      const double step = spec.loc_std / 4.0;
      const auto n_loc = static_cast<long>(std::floor(spec.loc_max / step + 1e-9));
      for (long i = 0; i <= n_loc; ++i) {
        double m = static_cast<double>(i) * step;
        elements.push_back(labelled(atomize(LocatedNormal{m, spec.loc_std}, spec.loc_atom_count),
                                    fmt_label("N(m,std) m=", m)));
      }
      break;
    }
    case PriorClass::zcurve:
      for (int j = 0; j <= 6; ++j) elements.push_back(AtomizedPrior::point_mass(j, fmt_label("delta_", j)));
      break;
  }
  return PriorDictionary(std::move(elements), spec, region);
}

double prior_integral(const AtomizedPrior& g, const WeightFn& psi) {
  double total = 0.0;
  const auto& u = g.support();
  const auto& w = g.weights();
  for (std::size_t k = 0; k < u.size(); ++k) {
    double v = psi(u[k]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "prior_integral: non-finite weight function value at atom " << k << " (u=" << u[k] << ")";
      fail(ErrorKind::numeric, os.str());
    }
    total += w[k] * v;
  }
  return total;
}

AtomizedPrior mix(const PriorDictionary& dict, std::span<const double> pi) {
  if (pi.size() != dict.size()) fail(ErrorKind::config, "mix: weight vector length mismatch");
  std::vector<double> u, w;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (pi[j] == 0.0) continue;
    const auto& g = dict[j];
    for (std::size_t k = 0; k < g.size(); ++k) {
      u.push_back(g.support()[k]);
      w.push_back(pi[j] * g.weights()[k]);
    }
  }
  return AtomizedPrior(std::move(u), std::move(w), "mixture");
}

}  // namespace tiltci
