#include "tiltci/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <json.hpp>

#include "tiltci/errors.hpp"
#include "tiltci/io.hpp"
#include "tiltci/parallel.hpp"
#include "tiltci/tilting.hpp"

namespace tiltci {

void SimConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::config, "simulation config: " + msg);
  };
  require(n_all >= 1, "n_all must be >= 1");
  require(n_reps >= 1, "n_reps must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(publication.inside > 0.0 && publication.inside <= 1.0, "publication probability on the region must lie in (0,1]");
  require(publication.outside >= 0.0 && publication.outside <= 1.0, "publication probability off the region must lie in [0,1]");
  require(!estimands.empty(), "no estimands");
  require(run_floc || run_bootstrap, "no method selected");
  require(bootstrap_b >= 2, "bootstrap B must be >= 2");
  require(grid_points >= 2, "grid_points must be >= 2");
  require(em_max_iter >= 0 && bootstrap_max_iter >= 0 && em_tol > 0.0, "bad EM settings");
  bool any_z = false;
  for (auto id : estimands) {
    require(id != EstimandId::omega && id != EstimandId::poisson_post_mean,
            "estimand " + to_string(id) + " is not supported in coverage runs");
    any_z = any_z || takes_z(id);
  }
  require(!any_z || !z_grid.empty(), "z-indexed estimands need a z grid");
  for (double z : z_grid) require(z >= 0.0 && std::isfinite(z), "z grid values must be >= 0");
  prior_spec.validate();
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t rep) { return std::mt19937_64(seed ^ rep); }

std::vector<Triplet> generate(const SimConfig& config, std::mt19937_64& rng) {
  const auto& g = config.true_prior;
  boost::random::discrete_distribution<std::size_t> atom(g.weights().begin(), g.weights().end());
  boost::random::bernoulli_distribution<> coin(0.5);
  boost::random::normal_distribution<double> noise;
  boost::random::uniform_01<double> unif;
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(config.n_all));
  for (std::int64_t i = 0; i < config.n_all; ++i) {
    double mu = g.support()[atom(rng)];
    if (coin(rng)) mu = -mu;
    double abs_z = std::abs(mu + noise(rng));
    int d = unif(rng) < config.publication.prob(abs_z) ? 1 : 0;
    out.push_back({mu, abs_z, d});
  }
  return out;
}

std::vector<Triplet> generate(const SimConfig& config, std::uint64_t rep) {
  auto rng = replicate_engine(config.seed, rep);
  return generate(config, rng);
}

std::vector<double> observed_values(const std::vector<Triplet>& data, const SelectionRegion& region) {
  std::vector<double> v;
  for (const auto& t : data)
    if (t.d == 1 && region.contains(t.abs_z)) v.push_back(t.abs_z);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> truncated_likelihood(std::span<const double> sample, std::span<const double> support,
                                         const SelectionRegion& region) {
  const std::size_t n = sample.size(), K = support.size();
  std::vector<double> sel(K);
  for (std::size_t j = 0; j < K; ++j) {
    sel[j] = region.probability(support[j]);
    if (!(sel[j] > 0.0)) fail(ErrorKind::degenerate, "EM: support point with zero selection probability");
  }
  std::vector<double> lik(n * K);
  for (std::size_t i = 0; i < n; ++i) {
    if (!region.contains(sample[i])) fail(ErrorKind::domain, "EM: observation outside the selection region");
    for (std::size_t j = 0; j < K; ++j) lik[i * K + j] = folded_density(sample[i], support[j]) / sel[j];
  }
  return lik;
}

namespace {

struct EmWorkspace {
  std::size_t n, K;
  const std::vector<double>& lik;
  std::span<const double> mult;

  double loglik(const std::vector<double>& pi) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double c = mult.empty() ? 1.0 : mult[i];
      if (c == 0.0) continue;
      double f = 0.0;
      for (std::size_t j = 0; j < K; ++j) f += pi[j] * lik[i * K + j];
      ll += c * std::log(f);
    }
    return ll;
  }

  // One EM update; returns the largest weight change.
  double step(std::vector<double>& pi, std::vector<double>& next) const {
    std::fill(next.begin(), next.end(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double c = mult.empty() ? 1.0 : mult[i];
      if (c == 0.0) continue;
      const double* row = &lik[i * K];
      double f = 0.0;
      for (std::size_t j = 0; j < K; ++j) f += pi[j] * row[j];
      if (!(f > 0.0)) continue;
      const double scale = c / f;
      for (std::size_t j = 0; j < K; ++j) next[j] += pi[j] * row[j] * scale;
      total += c;
    }
    double change = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      next[j] /= total;
      change = std::max(change, std::abs(next[j] - pi[j]));
    }
    pi.swap(next);
    return change;
  }
};

EmFit run_em(const std::vector<double>& lik, std::size_t n, std::size_t K, int max_iter, double tol,
             std::span<const double> init, std::span<const double> mult, bool trace) {
  EmFit fit;
  fit.weights = init.empty() ? std::vector<double>(K, 1.0 / K) : std::vector<double>(init.begin(), init.end());
  EmWorkspace ws{n, K, lik, mult};
  std::vector<double> next(K);
  for (int it = 0; it < max_iter; ++it) {
    if (trace) fit.loglik.push_back(ws.loglik(fit.weights));
    double change = ws.step(fit.weights, next);
    ++fit.iterations;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }
  if (trace) fit.loglik.push_back(ws.loglik(fit.weights));
  return fit;
}

}  // namespace

EmFit em_npmle_fit(std::span<const double> sample, std::span<const double> support, const SelectionRegion& region,
                   int max_iter, double tol, std::span<const double> init, std::span<const double> multiplicity,
                   bool trace) {
  if (sample.empty()) fail(ErrorKind::insufficient, "EM: empty sample");
  if (support.empty()) fail(ErrorKind::config, "EM: empty support");
  if (!init.empty() && init.size() != support.size()) fail(ErrorKind::config, "EM: init length mismatch");
  if (!multiplicity.empty() && multiplicity.size() != sample.size())
    fail(ErrorKind::config, "EM: multiplicity length mismatch");
  auto lik = truncated_likelihood(sample, support, region);
  return run_em(lik, sample.size(), support.size(), max_iter, tol, init, multiplicity, trace);
}

std::vector<double> zcurve_support() { return {0, 1, 2, 3, 4, 5, 6}; }

Interval percentile_interval(std::vector<double>& values, double alpha) {
  if (values.empty()) fail(ErrorKind::insufficient, "percentile interval: no values");
  std::sort(values.begin(), values.end());
  const double last = static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(last * alpha / 2.0));
  auto hi = static_cast<std::size_t>(std::ceil(last * (1.0 - alpha / 2.0)));
  return {values[lo], values[std::min(hi, values.size() - 1)]};
}

std::vector<Interval> bootstrap_ci(std::span<const double> sample, const std::vector<RatioFunctional>& functionals,
                                   int b, double alpha, std::mt19937_64& rng, const SelectionRegion& region,
                                   int max_iter, double tol, int refit_max_iter) {
  if (b < 2) fail(ErrorKind::config, "bootstrap: B must be >= 2");
  if (sample.empty()) fail(ErrorKind::insufficient, "bootstrap: empty sample");
  const auto support = zcurve_support();
  const std::size_t n = sample.size(), K = support.size();
  auto lik = truncated_likelihood(sample, support, region);
  std::vector<double> sel(K);
  for (std::size_t j = 0; j < K; ++j) sel[j] = region.probability(support[j]);

  // Per-support-point functional values, so each resample only mixes K numbers.
  std::vector<std::vector<double>> nu(functionals.size(), std::vector<double>(K)),
      de(functionals.size(), std::vector<double>(K));
  for (std::size_t f = 0; f < functionals.size(); ++f)
    for (std::size_t j = 0; j < K; ++j) {
      nu[f][j] = functionals[f].nu(support[j]);
      de[f][j] = functionals[f].delta(support[j]);
    }

  const auto full = run_em(lik, n, K, max_iter, tol, {}, {}, false);
  std::vector<std::vector<double>> draws(functionals.size());
  boost::random::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> mult(n);
  for (int rep = 0; rep < b; ++rep) {
    std::fill(mult.begin(), mult.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) mult[pick(rng)] += 1.0;
    auto fit = run_em(lik, n, K, refit_max_iter, tol, full.weights, mult, false);
    auto pi = map_weights(fit.weights, sel, MapDirection::to_original);
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < K; ++j) {
        num += pi[j] * nu[f][j];
        den += pi[j] * de[f][j];
      }
      draws[f].push_back(num / den);
    }
  }
  std::vector<Interval> out;
  out.reserve(functionals.size());
  for (auto& d : draws) out.push_back(percentile_interval(d, alpha));
  return out;
}

namespace {

struct RepOutcome {
  std::vector<std::optional<Interval>> floc, boot;
  std::size_t n_trun = 0;
};

}  // namespace

CoverageReport mc_coverage(const SimConfig& config) {
  config.validate();
  std::vector<RatioFunctional> fs;
  for (auto id : config.estimands) {
    if (takes_z(id)) {
      for (double z : config.z_grid) fs.push_back(make_estimand(id, z, config.region));
    } else {
      fs.push_back(make_estimand(id, std::nullopt, config.region));
    }
  }
  std::vector<double> truth(fs.size());
  for (std::size_t f = 0; f < fs.size(); ++f) truth[f] = evaluate_plugin(config.true_prior, fs[f]);

  std::optional<PriorDictionary> dict;
  if (config.run_floc) dict.emplace(build_dictionary(config.prior_spec, config.region));

  std::vector<RepOutcome> reps(config.n_reps);
  parallel_for(
      static_cast<std::size_t>(config.n_reps),
      [&](std::size_t r) {
        auto rng = replicate_engine(config.seed, r);
        auto data = generate(config, rng);
        auto obs = observed_values(data, config.region);
        auto& out = reps[r];
        out.n_trun = obs.size();
        out.floc.assign(fs.size(), std::nullopt);
        out.boot.assign(fs.size(), std::nullopt);
        if (obs.size() < 2) return;
        if (config.run_floc) {
          try {
            auto problem = FLocProblem::build(*dict, TruncatedSample::make(obs, config.region), config.alpha,
                                              config.grid_points);
            for (std::size_t f = 0; f < fs.size(); ++f) {
              try {
                auto res = solve_bounds(problem, fs[f]);
                out.floc[f] = Interval{res.lower, res.upper};
              } catch (const Error&) {
              }
            }
          } catch (const Error&) {
          }
        }
        if (config.run_bootstrap) {
          try {
            auto ivs = bootstrap_ci(obs, fs, config.bootstrap_b, config.alpha, rng, config.region,
                                    config.em_max_iter, config.em_tol, config.bootstrap_max_iter);
            for (std::size_t f = 0; f < fs.size(); ++f) out.boot[f] = ivs[f];
          } catch (const Error&) {
          }
        }
      },
      config.threads);

  CoverageReport report;
  report.n_reps = config.n_reps;
  for (const auto& r : reps) report.mean_n_trun += static_cast<double>(r.n_trun) / config.n_reps;

  auto summarize = [&](const char* method, auto member) {
    int all_covered = 0;
    for (const auto& r : reps) {
      bool ok = true;
      for (std::size_t f = 0; f < fs.size(); ++f) {
        const auto& iv = (r.*member)[f];
        ok = ok && iv && iv->lo <= truth[f] && truth[f] <= iv->hi;
      }
      all_covered += ok;
    }
    report.simultaneous.emplace_back(method, static_cast<double>(all_covered) / config.n_reps);
    for (std::size_t f = 0; f < fs.size(); ++f) {
      CoverageRow row{to_string(fs[f].id), fs[f].z, method, truth[f]};
      int covered = 0;
      for (const auto& r : reps) {
        const auto& iv = (r.*member)[f];
        if (!iv) {
          ++row.n_failed;
          continue;
        }
        ++row.n_ok;
        covered += iv->lo <= truth[f] && truth[f] <= iv->hi;
        row.mean_lower += iv->lo;
        row.mean_upper += iv->hi;
      }
      // Failed replicates count as misses.
      row.coverage = static_cast<double>(covered) / config.n_reps;
      if (row.n_ok > 0) {
        row.mean_lower /= row.n_ok;
        row.mean_upper /= row.n_ok;
      } else {
        row.mean_lower = row.mean_upper = std::nan("");
      }
      report.rows.push_back(row);
    }
  };
  if (config.run_floc) summarize("floc", &RepOutcome::floc);
  if (config.run_bootstrap) summarize("bootstrap", &RepOutcome::boot);
  return report;
}

std::string CoverageReport::to_csv() const {
  std::ostringstream os;
  os << "estimand,z,coverage,mean_lower,mean_upper,method\n";
  for (const auto& r : rows)
    os << r.estimand << ',' << (r.z ? format_number(*r.z) : "") << ',' << format_number(r.coverage) << ','
       << format_number(r.mean_lower) << ',' << format_number(r.mean_upper) << ',' << r.method << '\n';
  return os.str();
}

std::string CoverageReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  nlohmann::ordered_json j;
  j["n_reps"] = n_reps;
  j["mean_n_trun"] = mean_n_trun;
  for (const auto& [method, cov] : simultaneous) j["simultaneous_coverage"][method] = cov;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"estimand", r.estimand},
                         {"z", r.z ? nlohmann::json(*r.z) : nlohmann::json(nullptr)},
                         {"method", r.method},
                         {"truth", num(r.truth)},
                         {"coverage", r.coverage},
                         {"mean_lower", num(r.mean_lower)},
                         {"mean_upper", num(r.mean_upper)},
                         {"n_ok", r.n_ok},
                         {"n_failed", r.n_failed}});
  return j.dump(2) + "\n";
}

}  // namespace tiltci
