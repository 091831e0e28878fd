#include "tiltci/lp.hpp"

#include <cmath>
#include <limits>

#include "tiltci/errors.hpp"

namespace tiltci {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

// Tableau layout: rows 0..m-1 constraints, row m objective, row m+1 phase-one
// objective. Column n is the artificial variable, column n+1 the right side.
DenseLp::DenseLp(int m, int n, std::vector<double> a, std::vector<double> b, std::vector<double> c)
    : m_(m), n_(n), width_(n + 2), basic_(m), nonbasic_(n + 1),
      d_(static_cast<std::size_t>(m + 2) * (n + 2), 0.0) {
  if (a.size() != static_cast<std::size_t>(m) * n || b.size() != static_cast<std::size_t>(m) ||
      c.size() != static_cast<std::size_t>(n))
    fail(ErrorKind::config, "DenseLp: dimension mismatch");
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) at(i, j) = a[static_cast<std::size_t>(i) * n + j];
    basic_[i] = n + i;
    at(i, n) = -1.0;
    at(i, n + 1) = b[i];
  }
  for (int j = 0; j < n; ++j) {
    nonbasic_[j] = j;
    at(m, j) = -c[j];
  }
  nonbasic_[n] = -1;
  at(m + 1, n) = 1.0;
}

void DenseLp::pivot(int r, int s) {
  double* row_r = &at(r, 0);
  const double inv = 1.0 / row_r[s];
  for (int i = 0; i < m_ + 2; ++i) {
    if (i == r) continue;
    double* row = &at(i, 0);
    const double f = row[s] * inv;
    if (std::abs(f) <= 1e-300) continue;
    for (int j = 0; j < width_; ++j) row[j] -= row_r[j] * f;
    row[s] = -f;
  }
  for (int j = 0; j < width_; ++j) row_r[j] *= inv;
  row_r[s] = inv;
  std::swap(basic_[r], nonbasic_[s]);
}

bool DenseLp::run(int phase, double eps, long max_pivots, long& pivots, bool& hit_limit) {
  const int obj = phase == 1 ? m_ + 1 : m_;
  int degenerate_streak = 0;
  for (;;) {
    // Dantzig pricing until stalling, then Bland's rule to break cycles.
    const bool bland = degenerate_streak > 50;
    int s = -1;
    for (int j = 0; j <= n_; ++j) {
      if (phase == 2 && nonbasic_[j] == -1) continue;
      double v = at(obj, j);
      if (v >= -eps) continue;
      if (s == -1) { s = j; continue; }
      if (bland ? nonbasic_[j] < nonbasic_[s] : v < at(obj, s)) s = j;
    }
    if (s == -1) return true;

    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      double a = at(i, s);
      if (a <= eps) continue;
      double ratio = at(i, n_ + 1) / a;
      if (r == -1 || ratio < best - 1e-12 || (ratio <= best + 1e-12 && basic_[i] < basic_[r])) {
        r = i;
        best = ratio;
      }
    }
    if (r == -1) return false;
    degenerate_streak = best <= eps ? degenerate_streak + 1 : 0;
    pivot(r, s);
    if (++pivots >= max_pivots) {
      hit_limit = true;
      return true;
    }
  }
}

LpResult DenseLp::maximize(double eps, long max_pivots) {
  LpResult res;
  bool hit_limit = false;
  int r = 0;
  for (int i = 1; i < m_; ++i)
    if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
  if (m_ > 0 && at(r, n_ + 1) < -eps) {
    pivot(r, n_);
    run(1, eps, max_pivots, res.pivots, hit_limit);
    if (hit_limit) {
      res.status = LpStatus::iteration_limit;
      return res;
    }
    if (at(m_ + 1, n_ + 1) < -eps) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Drive the artificial variable out of the basis if it is still there.
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] != -1) continue;
      int s = -1;
      for (int j = 0; j <= n_; ++j)
        if (nonbasic_[j] != -1 && (s == -1 || std::abs(at(i, j)) > std::abs(at(i, s)))) s = j;
      if (s != -1 && std::abs(at(i, s)) > eps) pivot(i, s);
    }
  }
  bool bounded = run(2, eps, max_pivots, res.pivots, hit_limit);
  res.x.assign(n_, 0.0);
  for (int i = 0; i < m_; ++i)
    if (basic_[i] >= 0 && basic_[i] < n_) res.x[basic_[i]] = at(i, n_ + 1);
  if (hit_limit) {
    res.status = LpStatus::iteration_limit;
  } else if (!bounded) {
    res.status = LpStatus::unbounded;
    res.objective = std::numeric_limits<double>::infinity();
  } else {
    res.status = LpStatus::optimal;
    res.objective = at(m_, n_ + 1);
  }
  return res;
}

}  // namespace tiltci
