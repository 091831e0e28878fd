#pragma once

// Folded-normal primitives. Noise variance is fixed at one throughout.

#include <limits>
#include <string>
#include <vector>

namespace tiltci {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Two-sided 5% critical value used by the power and significance estimands.
inline constexpr double kCritical = 1.96;

double normal_pdf(double x);
/// Standard normal CDF; exactly 0 at -inf and 1 at +inf.
double normal_cdf(double x);
double normal_quantile(double p);

/// P[lo <= N(0,1) <= hi], computed from whichever tail keeps precision.
double normal_prob_between(double lo, double hi);

/// phi(z - u) + phi(z + u): density of |N(u,1)| at z.
double folded_density(double z, double u);

/// P[|Z| in [a, b]] for Z ~ N(u, 1); b may be kInf. Throws on a > b.
double fold_interval_prob(double a, double b, double u);

/// Power of the two-sided level-0.05 z-test; even in u.
double power_beta(double u);

struct ClosedInterval {
  double lo;
  double hi;  // kInf for right-unbounded
};

/// Union of disjoint closed intervals on [0, inf) with positive total length.
class SelectionRegion {
 public:
  explicit SelectionRegion(std::vector<ClosedInterval> intervals);

  static SelectionRegion half_line(double lo) { return SelectionRegion({{lo, kInf}}); }
  static SelectionRegion bounded(double lo, double hi) { return SelectionRegion({{lo, hi}}); }
  /// Parses "a" (meaning [a, inf)), "a:b", or "a:inf".
  static SelectionRegion parse(const std::string& text);

  const std::vector<ClosedInterval>& intervals() const { return intervals_; }
  bool contains(double z) const;
  double measure() const;
  double lower() const { return intervals_.front().lo; }
  double upper() const { return intervals_.back().hi; }

  /// P[|Z| in region] for Z ~ N(u, 1).
  double probability(double u) const;
  /// P[|Z| in region and |Z| <= t] for Z ~ N(u, 1).
  double probability_below(double t, double u) const;

  std::string to_string() const;
  bool operator==(const SelectionRegion&) const = default;

 private:
  std::vector<ClosedInterval> intervals_;
};

inline bool operator==(const ClosedInterval& a, const ClosedInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

double selection_prob(const SelectionRegion& region, double u);

}  // namespace tiltci
