#pragma once

// Dense two-phase simplex for  max c^T x  s.t.  A x <= b, x >= 0.

#include <vector>

namespace tiltci {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  long pivots = 0;
};

class DenseLp {
 public:
  /// A is row-major m x n.
  DenseLp(int m, int n, std::vector<double> a, std::vector<double> b, std::vector<double> c);

  LpResult maximize(double eps = 1e-9, long max_pivots = 200000);

 private:
  double& at(int i, int j) { return d_[static_cast<std::size_t>(i) * width_ + j]; }
  void pivot(int r, int s);
  bool run(int phase, double eps, long max_pivots, long& pivots, bool& hit_limit);

  int m_, n_, width_;
  std::vector<int> basic_, nonbasic_;
  std::vector<double> d_;
};

}  // namespace tiltci
