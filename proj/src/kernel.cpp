#include "tiltci/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "tiltci/errors.hpp"

namespace tiltci {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

// Upper tail Q(x) = P[N(0,1) > x].
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    fail(ErrorKind::domain, "normal_quantile: p outside [0,1]");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_prob_between(double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (lo >= 0.0) return upper_tail(lo) - upper_tail(hi);
  if (hi <= 0.0) return upper_tail(-hi) - upper_tail(-lo);
  return 1.0 - upper_tail(-lo) - upper_tail(hi);
}

double folded_density(double z, double u) { return normal_pdf(z - u) + normal_pdf(z + u); }

double fold_interval_prob(double a, double b, double u) {
  if (a > b) fail(ErrorKind::domain, "fold_interval_prob: a > b");
  // |Z| in [a,b]  <=>  Z in [a,b] or Z in [-b,-a].
  return normal_prob_between(a - u, b - u) + normal_prob_between(-b - u, -a - u);
}

double power_beta(double u) { return fold_interval_prob(kCritical, kInf, std::abs(u)); }

SelectionRegion::SelectionRegion(std::vector<ClosedInterval> intervals)
    : intervals_(std::move(intervals)) {
  if (intervals_.empty()) fail(ErrorKind::config, "selection region: no intervals");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!(iv.lo >= 0.0) || !(iv.hi >= iv.lo) || std::isnan(iv.hi))
      fail(ErrorKind::config, "selection region: invalid interval");
    if (i > 0 && !(iv.lo > intervals_[i - 1].hi))
      fail(ErrorKind::config, "selection region: intervals must be disjoint and sorted");
  }
  if (!(measure() > 0.0)) fail(ErrorKind::config, "selection region: zero Lebesgue measure");
}

SelectionRegion SelectionRegion::parse(const std::string& text) {
  auto to_num = [&](std::string s) -> double {
    if (s == "inf" || s == "Inf" || s == "+inf") return kInf;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      fail(ErrorKind::config, "cannot parse region bound '" + s + "'");
    return v;
  };
  std::vector<ClosedInterval> out;
  std::stringstream pieces(text);
  std::string piece;
  while (std::getline(pieces, piece, ',')) {
    auto colon = piece.find(':');
    if (colon == std::string::npos) {
      out.push_back({to_num(piece), kInf});
    } else {
      out.push_back({to_num(piece.substr(0, colon)), to_num(piece.substr(colon + 1))});
    }
  }
  return SelectionRegion(std::move(out));
}

bool SelectionRegion::contains(double z) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [z](const ClosedInterval& iv) { return z >= iv.lo && z <= iv.hi; });
}

double SelectionRegion::measure() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.hi - iv.lo;
  return total;
}

double SelectionRegion::probability(double u) const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += fold_interval_prob(iv.lo, iv.hi, u);
  return total;
}

double SelectionRegion::probability_below(double t, double u) const {
  double total = 0.0;
  for (const auto& iv : intervals_) {
    if (t < iv.lo) break;
    total += fold_interval_prob(iv.lo, std::min(iv.hi, t), u);
  }
  return total;
}

std::string SelectionRegion::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i) os << ',';
    os << intervals_[i].lo << ':';
    if (intervals_[i].hi == kInf) os << "inf"; else os << intervals_[i].hi;
  }
  return os.str();
}

double selection_prob(const SelectionRegion& region, double u) { return region.probability(u); }

}  // namespace tiltci
