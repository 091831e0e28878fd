#include <doctest.h>

#include <random>

#include "tiltci/lp.hpp"

using namespace tiltci;
using doctest::Approx;

TEST_CASE("textbook maximization") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  DenseLp lp(3, 2, {1, 0, 0, 2, 3, 2}, {4, 12, 18}, {3, 5});
  auto r = lp.maximize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == Approx(36.0));
  CHECK(r.x[0] == Approx(2.0));
  CHECK(r.x[1] == Approx(6.0));
}

TEST_CASE("negative right-hand sides need phase one") {
  // x + y >= 2, x <= 3, y <= 3; max -x - y -> 2 at value -2.
  DenseLp lp(3, 2, {-1, -1, 1, 0, 0, 1}, {-2, 3, 3}, {-1, -1});
  auto r = lp.maximize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == Approx(-2.0));
  CHECK(r.x[0] + r.x[1] == Approx(2.0));
}

TEST_CASE("infeasible and unbounded programs") {
  DenseLp inf(2, 1, {1, -1}, {1, -2}, {1});
  CHECK(inf.maximize().status == LpStatus::infeasible);
  DenseLp unb(1, 2, {1, -1}, {1}, {0, 1});
  CHECK(unb.maximize().status == LpStatus::unbounded);
}

TEST_CASE("equality via paired inequalities on a simplex") {
  // max c.x over the probability simplex picks the largest coefficient.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 12;
    std::vector<double> a(2 * n), c(n);
    for (int j = 0; j < n; ++j) {
      a[j] = 1;
      a[n + j] = -1;
      c[j] = u(rng);
    }
    DenseLp lp(2, n, a, {1, -1}, c);
    auto r = lp.maximize();
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == Approx(*std::max_element(c.begin(), c.end())));
  }
}

TEST_CASE("degenerate programs terminate") {
  // Many redundant constraints through the optimum.
  const int m = 40;
  std::vector<double> a, b;
  for (int i = 0; i < m; ++i) {
    a.push_back(1.0);
    a.push_back(1.0 + i * 1e-3);
    b.push_back(1.0);
  }
  DenseLp lp(m, 2, a, b, {1, 1});
  auto r = lp.maximize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == Approx(1.0));
}
