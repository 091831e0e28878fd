#include "tiltci/estimands.hpp"

#include <cmath>

#include "tiltci/errors.hpp"

namespace tiltci {

namespace {

void check_z(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) fail(ErrorKind::domain, "estimand: z must be finite and >= 0");
}

double odds(double p) { return p >= 1.0 ? kInf : p / (1.0 - p); }

WeightFn fold_fn(double z) {
  return [z](double u) { return folded_density(z, u); };
}

}  // namespace

std::string to_string(EstimandId id) {
  switch (id) {
    case EstimandId::marginal: return "marginal";
    case EstimandId::marginal_norm: return "marginal_norm";
    case EstimandId::power_bin: return "power_bin";
    case EstimandId::power_ge80: return "power_ge80";
    case EstimandId::sign_agreement: return "sign_agreement";
    case EstimandId::sym_post_mean: return "sym_post_mean";
    case EstimandId::repl_prob: return "repl_prob";
    case EstimandId::future_coverage: return "future_coverage";
    case EstimandId::effect_repl: return "effect_repl";
    case EstimandId::prob_nonsig: return "prob_nonsig";
    case EstimandId::omega: return "omega";
    case EstimandId::poisson_post_mean: return "poisson_post_mean";
  }
  return "?";
}

EstimandId parse_estimand(const std::string& text) {
  for (int i = 0; i <= static_cast<int>(EstimandId::omega); ++i) {
    auto id = static_cast<EstimandId>(i);
    if (to_string(id) == text) return id;
  }
  fail(ErrorKind::config, "unknown estimand '" + text + "'");
}

bool takes_z(EstimandId id) {
  switch (id) {
    case EstimandId::power_bin:
    case EstimandId::power_ge80:
    case EstimandId::prob_nonsig:
    case EstimandId::omega:
      return false;
    default:
      return true;
  }
}

WeightFn symmetrize(WeightFn signed_fn) {
  return [f = std::move(signed_fn)](double u) { return 0.5 * (f(u) + f(-u)); };
}

RatioFunctional make_marginal_density(double z) {
  check_z(z);
  return {EstimandId::marginal, z, fold_fn(z), [](double) { return 1.0; }, "density of |Z| at z"};
}

RatioFunctional make_normalized_marginal(double z, const SelectionRegion& region) {
  check_z(z);
  return {EstimandId::marginal_norm, z, fold_fn(z),
          [region](double u) { return region.probability(u); },
          "density of |Z| at z normalized by the selection probability"};
}

RatioFunctional make_power_bin(Interval bin, bool lower_open) {
  if (!(bin.lo >= 0.0 && bin.hi <= 1.0 && bin.lo <= bin.hi))
    fail(ErrorKind::domain, "power_bin: interval must lie in [0,1]");
  return {EstimandId::power_bin, std::nullopt,
          [bin, lower_open](double u) {
            double b = power_beta(u);
            bool above = lower_open ? b > bin.lo : b >= bin.lo;
            return above && b <= bin.hi ? 1.0 : 0.0;
          },
          [](double) { return 1.0; }, "probability that power falls in a bin"};
}

RatioFunctional make_power_ge80() {
  auto f = make_power_bin({0.8, 1.0});
  f.id = EstimandId::power_ge80;
  f.description = "proportion of studies with power >= 0.8";
  return f;
}

RatioFunctional make_sign_agreement(double z) {
  check_z(z);
  return {EstimandId::sign_agreement, z,
          [z](double u) { return u > 0.0 ? normal_pdf(z - u) : 0.0; }, fold_fn(z),
          "P[sign(mu) = sign(Z) | |Z| = z]"};
}

RatioFunctional make_symmetrized_posterior_mean(double z) {
  check_z(z);
  return {EstimandId::sym_post_mean, z,
          [z](double u) { return u * (normal_pdf(z - u) - normal_pdf(z + u)); }, fold_fn(z),
          "posterior mean of mu at Z = z under the symmetrized prior"};
}

RatioFunctional make_replication_prob(double z) {
  check_z(z);
  auto nu = [z](double m) {
    return normal_cdf(m - kCritical) * normal_pdf(z - m) + normal_cdf(-kCritical - m) * normal_pdf(-z - m);
  };
  return {EstimandId::repl_prob, z, symmetrize(nu), fold_fn(z),
          "probability that a replication is significant in the same direction"};
}

RatioFunctional make_future_coverage(double z) {
  check_z(z);
  auto nu = [z](double m) {
    double plus = normal_cdf(z + kCritical - m) - normal_cdf(z - kCritical - m);
    double minus = normal_cdf(-z + kCritical - m) - normal_cdf(-z - kCritical - m);
    return plus * normal_pdf(z - m) + minus * normal_pdf(-z - m);
  };
  return {EstimandId::future_coverage, z, symmetrize(nu), fold_fn(z),
          "probability that the replication 95% interval covers the original z"};
}

RatioFunctional make_effect_size_repl(double z) {
  check_z(z);
  auto nu = [z](double m) {
    double au = std::abs(m);
    return (1.0 - normal_cdf(z - m) + normal_cdf(-z - m)) * folded_density(z, au);
  };
  return {EstimandId::effect_repl, z, symmetrize(nu), fold_fn(z),
          "probability that the replication |z| is at least as large"};
}

RatioFunctional make_prob_nonsig() {
  return {EstimandId::prob_nonsig, std::nullopt,
          [](double u) { return normal_prob_between(-kCritical - u, kCritical - u); },
          [](double) { return 1.0; }, "P_G[|Z| < 1.96]"};
}

RatioFunctional make_estimand(EstimandId id, std::optional<double> z, const SelectionRegion& region,
                              Interval power_bin) {
  if (takes_z(id) && !z) fail(ErrorKind::config, "estimand " + to_string(id) + " needs z");
  switch (id) {
    case EstimandId::marginal: return make_marginal_density(*z);
    case EstimandId::marginal_norm: return make_normalized_marginal(*z, region);
    case EstimandId::power_bin: return make_power_bin(power_bin);
    case EstimandId::power_ge80: return make_power_ge80();
    case EstimandId::sign_agreement: return make_sign_agreement(*z);
    case EstimandId::sym_post_mean: return make_symmetrized_posterior_mean(*z);
    case EstimandId::repl_prob: return make_replication_prob(*z);
    case EstimandId::future_coverage: return make_future_coverage(*z);
    case EstimandId::effect_repl: return make_effect_size_repl(*z);
    case EstimandId::prob_nonsig: return make_prob_nonsig();
    case EstimandId::omega:
    case EstimandId::poisson_post_mean:
      break;
  }
  fail(ErrorKind::config, "estimand " + to_string(id) + " has no z-indexed normal functional");
}

double evaluate_plugin(const AtomizedPrior& g, const RatioFunctional& f) {
  double den = prior_integral(g, f.delta);
  if (den == 0.0) fail(ErrorKind::undefined, "evaluate_plugin: zero denominator");
  return prior_integral(g, f.nu) / den;
}

double evaluate_plugin(const PriorDictionary& dict, std::span<const double> pi, const RatioFunctional& f) {
  if (pi.size() != dict.size()) fail(ErrorKind::config, "evaluate_plugin: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (pi[j] == 0.0) continue;
    num += pi[j] * prior_integral(dict[j], f.nu);
    den += pi[j] * prior_integral(dict[j], f.delta);
  }
  if (den == 0.0) fail(ErrorKind::undefined, "evaluate_plugin: zero denominator");
  return num / den;
}

Interval omega1_wald(std::int64_t n_sig, std::int64_t n_published, double level) {
  if (n_published <= 0 || n_sig < 0 || n_sig > n_published)
    fail(ErrorKind::domain, "omega1_wald: need 0 <= n_sig <= n_published, n_published > 0");
  if (n_sig == 0 || n_sig == n_published)
    fail(ErrorKind::degenerate, "omega1_wald: significant fraction is 0 or 1");
  if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::domain, "omega1_wald: level outside (0,1)");
  double n = static_cast<double>(n_published);
  double p = n_sig / n;
  double half = normal_quantile(1.0 - (1.0 - level) / 2.0) * std::sqrt(p * (1.0 - p) / n);
  return {odds(std::max(0.0, p - half)), odds(std::min(1.0, p + half))};
}

Interval omega2_from_nonsig(Interval p_nonsig) {
  return {odds(std::clamp(p_nonsig.lo, 0.0, 1.0)), odds(std::clamp(p_nonsig.hi, 0.0, 1.0))};
}

OmegaResult combine_omega(Interval omega1, Interval omega2) {
  OmegaResult r;
  r.omega1 = omega1;
  r.omega2 = omega2;
  r.omega = {omega1.lo * omega2.lo, omega1.hi * omega2.hi};
  return r;
}

}  // namespace tiltci
