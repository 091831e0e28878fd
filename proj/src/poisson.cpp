#include "tiltci/poisson.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "tiltci/errors.hpp"
#include "tiltci/ingest.hpp"

namespace tiltci {

double poisson_pmf(int z, double u) {
  if (z < 0) return 0.0;
  if (u == 0.0) return z == 0 ? 1.0 : 0.0;
  return std::exp(z * std::log(u) - u - std::lgamma(z + 1.0));
}

double poisson_observed_prob(double u) { return -std::expm1(-u); }

void check_poisson_prior(const AtomizedPrior& g) {
  for (double u : g.support())
    if (!(u > 0.0)) fail(ErrorKind::domain, "poisson prior: atoms must be strictly positive");
}

namespace {

AtomizedPrior reweight(const AtomizedPrior& g, bool tilt) {
  check_poisson_prior(g);
  std::vector<double> w(g.size());
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double p = poisson_observed_prob(g.support()[k]);
    w[k] = tilt ? g.weights()[k] * p : g.weights()[k] / p;
    total += w[k];
  }
  for (auto& x : w) x /= total;
  return AtomizedPrior(g.support(), std::move(w), g.label());
}

}  // namespace

AtomizedPrior tilt_poisson(const AtomizedPrior& g) { return reweight(g, true); }
AtomizedPrior untilt_poisson(const AtomizedPrior& tg) { return reweight(tg, false); }

std::vector<double> zt_marginal_a(const AtomizedPrior& g, int z_max) {
  check_poisson_prior(g);
  if (z_max < 1) fail(ErrorKind::domain, "zt_marginal_a: z_max must be >= 1");
  double den = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) den += g.weights()[k] * poisson_observed_prob(g.support()[k]);
  std::vector<double> f(z_max, 0.0);
  for (int z = 1; z <= z_max; ++z) {
    for (std::size_t k = 0; k < g.size(); ++k) f[z - 1] += g.weights()[k] * poisson_pmf(z, g.support()[k]);
    f[z - 1] /= den;
  }
  return f;
}

std::vector<double> zt_marginal_b(const AtomizedPrior& g, int z_max) {
  check_poisson_prior(g);
  if (z_max < 1) fail(ErrorKind::domain, "zt_marginal_b: z_max must be >= 1");
  std::vector<double> f(z_max, 0.0);
  for (int z = 1; z <= z_max; ++z)
    for (std::size_t k = 0; k < g.size(); ++k) {
      double u = g.support()[k];
      f[z - 1] += g.weights()[k] * poisson_pmf(z, u) / poisson_observed_prob(u);
    }
  return f;
}

RatioFunctional poisson_posterior_mean_functional(int z) {
  if (z < 1) fail(ErrorKind::domain, "posterior mean: count z must be >= 1");
  return {EstimandId::poisson_post_mean, static_cast<double>(z),
          [z](double u) { return u * poisson_pmf(z, u); }, [z](double u) { return poisson_pmf(z, u); },
          "E[mu | Z = z] for zero-truncated Poisson counts"};
}

std::vector<double> poisson_support(int count, double lo, double hi) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) fail(ErrorKind::config, "poisson_support: bad grid");
  std::vector<double> u(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) u[k] = lo * std::exp(step * k);
  u.back() = hi;
  return u;
}

CountSample make_count_sample(std::vector<int> counts) {
  CountSample s;
  s.counts.reserve(counts.size());
  for (int c : counts) {
    if (c < 1) fail(ErrorKind::domain, "count sample: counts must be >= 1");
    s.counts.push_back(c);
  }
  std::sort(s.counts.begin(), s.counts.end());
  return s;
}

CountSample parse_count_csv(std::string_view text) {
  std::vector<int> counts;
  bool header = false;
  std::size_t count_col = 0, freq_col = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto fields = split_csv_line(text.substr(pos, end - pos));
    pos = end + 1;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (!fields[0].empty() && fields[0][0] == '#') continue;
    if (!header) {
      auto find = [&](const char* name) {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end()) fail(ErrorKind::parse, std::string("count CSV lacks column '") + name + "'");
        return static_cast<std::size_t>(it - fields.begin());
      };
      count_col = find("count");
      freq_col = find("species_frequency");
      header = true;
      continue;
    }
    auto to_int = [&](std::size_t col) {
      if (col >= fields.size()) fail(ErrorKind::parse, "count CSV: short row");
      const auto& f = fields[col];
      long v = 0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) fail(ErrorKind::parse, "count CSV: bad integer '" + f + "'");
      return v;
    };
    long c = to_int(count_col), n = to_int(freq_col);
    if (c < 1) fail(ErrorKind::domain, "count CSV: counts must be >= 1");
    if (n < 0) fail(ErrorKind::parse, "count CSV: negative frequency");
    counts.insert(counts.end(), static_cast<std::size_t>(n), static_cast<int>(c));
  }
  if (counts.empty()) fail(ErrorKind::insufficient, "count CSV contains no species");
  return make_count_sample(std::move(counts));
}

FLocProblem build_poisson_problem(const CountSample& sample, double alpha, const std::vector<double>& support) {
  if (sample.counts.size() < 2) fail(ErrorKind::insufficient, "poisson floc: need at least two species");
  std::vector<double> grid;
  for (double c : sample.counts)
    if (grid.empty() || c > grid.back()) grid.push_back(c);
  if (grid.size() < 2) fail(ErrorKind::insufficient, "poisson floc: need at least two distinct counts");
  auto ecdf = empirical_cdf(sample.counts, grid);
  const std::size_t K = support.size(), L = grid.size();
  std::vector<double> cdf(K * L), sel(K);
  std::vector<AtomizedPrior> elements;
  elements.reserve(K);
  const int z_top = static_cast<int>(grid.back());
  for (std::size_t j = 0; j < K; ++j) {
    const double u = support[j];
    sel[j] = poisson_observed_prob(u);
    elements.push_back(AtomizedPrior::point_mass(u));
    double acc = 0.0;
    std::size_t l = 0;
    for (int z = 1; z <= z_top; ++z) {
      acc += poisson_pmf(z, u);
      while (l < L && grid[l] == z) cdf[j * L + l++] = std::min(1.0, acc / sel[j]);
    }
  }
  return FLocProblem(std::move(grid), std::move(ecdf), sample.counts.size(), alpha, std::move(cdf),
                     std::move(elements), std::move(sel), "poisson_all");
}

}  // namespace tiltci
