#include "tiltci/floc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tiltci/cache.hpp"
#include "tiltci/errors.hpp"
#include "tiltci/io.hpp"
#include "tiltci/lp.hpp"
#include "tiltci/parallel.hpp"

namespace tiltci {

TruncatedSample TruncatedSample::make(std::vector<double> abs_values, SelectionRegion region) {
  for (double v : abs_values)
    if (!region.contains(v)) fail(ErrorKind::domain, "truncated sample: value " + format_number(v) + " outside region");
  std::sort(abs_values.begin(), abs_values.end());
  return {std::move(abs_values), std::move(region)};
}

std::vector<double> build_grid(std::span<const double> v, int points) {
  if (v.size() < 2) fail(ErrorKind::insufficient, "build_grid: need at least two observations");
  if (points < 2) fail(ErrorKind::config, "build_grid: need at least two grid points");
  const std::size_t n = v.size();
  std::vector<double> grid;
  grid.reserve(points);
  for (int l = 0; l < points; ++l) {
    // Order statistic at equispaced level l/(L-1).
    auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(l) * (n - 1) / (points - 1)));
    double s = v[std::min(idx, n - 1)];
    if (grid.empty() || s > grid.back()) grid.push_back(s);
  }
  return grid;
}

std::vector<double> build_grid(const TruncatedSample& sample, int points) {
  return build_grid(sample.values, points);
}

double dkw_radius(std::size_t n, double alpha) {
  if (n < 1) fail(ErrorKind::domain, "dkw_radius: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::domain, "dkw_radius: alpha must lie in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

std::vector<double> empirical_cdf(std::span<const double> v, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l)
    out[l] = static_cast<double>(std::upper_bound(v.begin(), v.end(), grid[l]) - v.begin()) / v.size();
  return out;
}

FLocProblem::FLocProblem(std::vector<double> grid, std::vector<double> ecdf, std::size_t n, double alpha,
                         std::vector<double> cdf, std::vector<AtomizedPrior> elements,
                         std::vector<double> sel_probs, std::string prior_class)
    : grid_(std::move(grid)), ecdf_(std::move(ecdf)), n_(n), alpha_(alpha), radius_(dkw_radius(n, alpha)),
      cdf_(std::move(cdf)), elements_(std::move(elements)), sel_probs_(std::move(sel_probs)),
      prior_class_(std::move(prior_class)) {
  if (grid_.size() < 2 || ecdf_.size() != grid_.size()) fail(ErrorKind::config, "floc problem: bad grid");
  if (elements_.size() != sel_probs_.size() || cdf_.size() != sel_probs_.size() * grid_.size())
    fail(ErrorKind::config, "floc problem: dimension mismatch");
  for (std::size_t l = 1; l < grid_.size(); ++l)
    if (!(grid_[l] > grid_[l - 1])) fail(ErrorKind::config, "floc problem: grid not strictly increasing");
  for (double p : sel_probs_)
    if (!(p > 0.0)) fail(ErrorKind::degenerate, "floc problem: element with zero selection probability");
}

namespace {

// Conditional CDF columns P[|Z| <= s_l, |Z| in S] / P_j for each element.
std::vector<double> cdf_columns(const PriorDictionary& dict, const std::vector<double>& grid) {
  const std::size_t K = dict.size(), L = grid.size();
  std::vector<double> cdf(K * L, 0.0);
  const auto& region = dict.region();
  const bool half_line = region.intervals().size() == 1;
  const double s0 = region.lower(), s1 = region.upper();
  parallel_for(K, [&](std::size_t j) {
    const auto& g = dict[j];
    double* col = &cdf[j * L];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double u = g.support()[k], w = g.weights()[k];
      if (half_line) {
        // Upper-tail differences: two erfc calls per grid point.
        const double q_lo = 0.5 * std::erfc((s0 - u) / std::numbers::sqrt2) +
                            0.5 * std::erfc((s0 + u) / std::numbers::sqrt2);
        for (std::size_t l = 0; l < L; ++l) {
          const double s = std::min(grid[l], s1);
          const double q_s = s == kInf ? 0.0
                                       : 0.5 * std::erfc((s - u) / std::numbers::sqrt2) +
                                             0.5 * std::erfc((s + u) / std::numbers::sqrt2);
          col[l] += w * std::max(0.0, q_lo - q_s);
        }
      } else {
        for (std::size_t l = 0; l < L; ++l) col[l] += w * region.probability_below(grid[l], u);
      }
    }
    const double p = dict.selection_probs()[j];
    for (std::size_t l = 0; l < L; ++l) col[l] = std::min(1.0, col[l] / p);
  });
  return cdf;
}

std::string grid_key(const PriorDictionary& dict, const std::vector<double>& grid) {
  std::string bytes = dict.spec().canonical() + "|" + dict.region().to_string() + "|";
  bytes.append(reinterpret_cast<const char*>(grid.data()), grid.size() * sizeof(double));
  return sha256_hex(bytes);
}

}  // namespace

FLocProblem FLocProblem::build(const PriorDictionary& dict, const TruncatedSample& sample, double alpha,
                               int grid_points) {
  if (!(sample.region == dict.region())) fail(ErrorKind::config, "floc: sample and dictionary regions differ");
  auto grid = build_grid(sample, grid_points);
  auto ecdf = empirical_cdf(sample.values, grid);
  const auto key = grid_key(dict, grid);
  auto cdf = cache_load(key, dict.size(), grid.size());
  if (!cdf) {
    cdf = cdf_columns(dict, grid);
    cache_store(key, dict.size(), grid.size(), *cdf);
  }
  FLocProblem p(std::move(grid), std::move(ecdf), sample.n(), alpha, std::move(*cdf), dict.elements(),
                dict.selection_probs(), to_string(dict.spec().cls));
  p.region_ = dict.region();
  return p;
}

ColumnPair FLocProblem::columns(const RatioFunctional& f) const {
  ColumnPair cols{std::vector<double>(K()), std::vector<double>(K())};
  for (std::size_t j = 0; j < K(); ++j) {
    cols.numer[j] = prior_integral(elements_[j], f.nu) / sel_probs_[j];
    cols.denom[j] = prior_integral(elements_[j], f.delta) / sel_probs_[j];
  }
  return cols;
}

FLocProblem FLocProblem::with_alpha(double alpha) const {
  FLocProblem p = *this;
  p.alpha_ = alpha;
  p.radius_ = dkw_radius(n_, alpha);
  return p;
}

double FLocProblem::band_distance(std::span<const double> pi) const {
  if (pi.size() != K()) fail(ErrorKind::config, "band_distance: length mismatch");
  double sup = 0.0;
  for (std::size_t l = 0; l < L(); ++l) {
    double f = 0.0;
    for (std::size_t j = 0; j < K(); ++j) f += pi[j] * cdf(j, l);
    sup = std::max(sup, std::abs(f - ecdf_[l]));
  }
  return sup;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double ratio_at(const ColumnPair& cols, const std::vector<double>& x) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    num += cols.numer[j] * x[j];
    den += cols.denom[j] * x[j];
  }
  return num / den;
}

std::vector<double> to_simplex(std::vector<double> x) {
  double total = 0.0;
  for (double v : x) total += v;
  if (total > 0.0)
    for (auto& v : x) v /= total;
  return x;
}

}  // namespace

IntervalResult solve_bounds(const FLocProblem& pb, const ColumnPair& cols) {
  const int K = static_cast<int>(pb.K()), L = static_cast<int>(pb.L());
  if (cols.numer.size() != pb.K() || cols.denom.size() != pb.K())
    fail(ErrorKind::config, "solve_bounds: column length mismatch");
  const double nmax = max_abs(cols.numer), dmax = max_abs(cols.denom);
  if (!(dmax > 0.0)) fail(ErrorKind::undefined, "solve_bounds: denominator vanishes on every element");
  for (std::size_t j = 0; j < pb.K(); ++j)
    if (!std::isfinite(cols.numer[j]) || !std::isfinite(cols.denom[j]))
      fail(ErrorKind::numeric, "solve_bounds: non-finite functional column");

  // Charnes-Cooper with zeta = sum(x) substituted into the band:
  //   sum_j x_j (cdf_lj - Fhat_l) <= r * sum_j x_j   and the mirror row,
  //   sum_j (d_j / dmax) x_j = 1.
  const int m = 2 * L + 2;
  std::vector<double> a(static_cast<std::size_t>(m) * K), b(m, 0.0);
  const double r = pb.radius();
  for (int l = 0; l < L; ++l) {
    double* up = &a[static_cast<std::size_t>(2 * l) * K];
    double* dn = up + K;
    for (int j = 0; j < K; ++j) {
      const double diff = pb.cdf(j, l) - pb.ecdf()[l];
      up[j] = diff - r;
      dn[j] = -diff - r;
    }
  }
  double* eq_hi = &a[static_cast<std::size_t>(2 * L) * K];
  double* eq_lo = eq_hi + K;
  for (int j = 0; j < K; ++j) {
    eq_hi[j] = cols.denom[j] / dmax;
    eq_lo[j] = -cols.denom[j] / dmax;
  }
  b[2 * L] = 1.0;
  b[2 * L + 1] = -1.0;

  std::vector<double> c(K);
  const double nscale = nmax > 0.0 ? nmax : 1.0;
  for (int j = 0; j < K; ++j) c[j] = cols.numer[j] / nscale;

  IntervalResult res;
  res.lp_variables = K;
  res.lp_constraints = m;
  res.alpha = pb.alpha();
  res.prior_class = pb.prior_class();

  auto solve = [&](double sign) {
    std::vector<double> cc(c);
    for (auto& v : cc) v *= sign;
    DenseLp lp(m, K, a, b, std::move(cc));
    return lp.maximize();
  };
  auto hi = solve(1.0);
  res.pivots += hi.pivots;
  if (hi.status == LpStatus::infeasible)
    fail(ErrorKind::empty_localization,
         "F-localization is empty: no mixture in the prior class fits the DKW band (misspecified class or an "
         "alpha-probability band miss)");
  auto lo = solve(-1.0);
  res.pivots += lo.pivots;
  if (lo.status == LpStatus::infeasible) fail(ErrorKind::empty_localization, "F-localization is empty");
  if (hi.status == LpStatus::iteration_limit || lo.status == LpStatus::iteration_limit)
    fail(ErrorKind::solver, "solve_bounds: simplex iteration limit reached");

  std::vector<std::string> notes;
  if (hi.status == LpStatus::unbounded) {
    res.upper = kInf;
    notes.push_back("unbounded_upper");
  } else {
    res.upper = ratio_at(cols, hi.x);
    res.argmax = to_simplex(hi.x);
  }
  if (lo.status == LpStatus::unbounded) {
    res.lower = -kInf;
    notes.push_back("unbounded_lower");
  } else {
    res.lower = ratio_at(cols, lo.x);
    res.argmin = to_simplex(lo.x);
  }
  if (res.lower > res.upper) std::swap(res.lower, res.upper);  // only possible at solver precision
  if (!notes.empty()) {
    res.status = notes.front();
    for (std::size_t i = 1; i < notes.size(); ++i) res.status += "+" + notes[i];
  }
  return res;
}

IntervalResult solve_bounds(const FLocProblem& problem, const RatioFunctional& f) {
  auto res = solve_bounds(problem, problem.columns(f));
  res.estimand = to_string(f.id);
  res.z = f.z;
  return res;
}

std::vector<IntervalResult> floc_band(const FLocProblem& problem, EstimandId id, std::span<const double> z_grid,
                                      unsigned threads) {
  std::vector<IntervalResult> out(z_grid.size());
  const SelectionRegion region = problem.region().value_or(SelectionRegion::half_line(0.0));
  parallel_for(
      z_grid.size(),
      [&](std::size_t i) {
        try {
          out[i] = solve_bounds(problem, make_estimand(id, z_grid[i], region));
        } catch (const Error& e) {
          IntervalResult r;
          r.estimand = to_string(id);
          r.z = z_grid[i];
          r.lower = r.upper = std::nan("");
          r.alpha = problem.alpha();
          r.prior_class = problem.prior_class();
          r.status = e.kind() == ErrorKind::empty_localization ? "empty_localization" : "error";
          out[i] = std::move(r);
        }
      },
      threads);
  return out;
}

OmegaResult floc_omega(const FLocProblem& problem, std::int64_t n_sig, std::int64_t n_published) {
  const double half = problem.alpha() / 2.0;
  auto w1 = omega1_wald(n_sig, n_published, 1.0 - half);
  auto nonsig = solve_bounds(problem.with_alpha(half), make_prob_nonsig());
  auto res = combine_omega(w1, omega2_from_nonsig({nonsig.lower, nonsig.upper}));
  res.n_published = n_published;
  res.p_hat = static_cast<double>(n_sig) / static_cast<double>(n_published);
  return res;
}

std::string intervals_to_csv(const std::vector<IntervalResult>& rows) {
  std::ostringstream os;
  os << "estimand,z,lower,upper,alpha,prior_class,method,status\n";
  for (const auto& r : rows)
    os << r.estimand << ',' << (r.z ? format_number(*r.z) : "") << ',' << format_number(r.lower) << ','
       << format_number(r.upper) << ',' << format_number(r.alpha) << ',' << r.prior_class << ',' << r.method
       << ',' << r.status << '\n';
  return os.str();
}

std::string intervals_to_json(const std::vector<IntervalResult>& rows) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"estimand", r.estimand},
                   {"z", r.z ? nlohmann::json(*r.z) : nlohmann::json(nullptr)},
                   {"lower", num(r.lower)},
                   {"upper", num(r.upper)},
                   {"alpha", r.alpha},
                   {"prior_class", r.prior_class},
                   {"method", r.method},
                   {"status", r.status}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace tiltci
