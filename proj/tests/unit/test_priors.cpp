#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tiltci/errors.hpp"
#include "tiltci/priors.hpp"

using namespace tiltci;
using doctest::Approx;

namespace {
const auto kRegion = SelectionRegion::half_line(2.1);
}

TEST_CASE("geometric grid runs to the first value at or above the maximum") {
  auto g = geometric_grid(0.001, 100.0, 1.2);
  // log(1e5)/log(1.2) = 63.15, so 64 steps and 65 points.
  CHECK(g.size() == 65);
  CHECK(g.front() == 0.001);
  CHECK(g.back() >= 100.0);
  CHECK(g[g.size() - 2] < 100.0);
  CHECK(std::ceil(std::log(1e5) / std::log(1.2)) + 1 == 65);
}

TEST_CASE("dictionary sizes per class") {
  CHECK(build_dictionary(PriorClassSpec::defaults(PriorClass::scale_normal), kRegion).size() == 65);
  CHECK(build_dictionary(PriorClassSpec::defaults(PriorClass::unimodal), kRegion).size() == 65);
  auto z = build_dictionary(PriorClassSpec::defaults(PriorClass::zcurve), kRegion);
  REQUIRE(z.size() == 7);
  for (int j = 0; j < 7; ++j) {
    CHECK(z[j].size() == 1);
    CHECK(z[j].support()[0] == j);
    CHECK(z[j].weights()[0] == 1.0);
  }
  auto all = build_dictionary(PriorClassSpec::defaults(PriorClass::all), kRegion);
  CHECK(all.size() == 65 + 961);
  CHECK(12.0 / 0.0125 + 1 == 961);
}

TEST_CASE("G^all contains the scale-normal elements unchanged") {
  auto sn = build_dictionary(PriorClassSpec::defaults(PriorClass::scale_normal), kRegion);
  auto all = build_dictionary(PriorClassSpec::defaults(PriorClass::all), kRegion);
  for (std::size_t j = 0; j < sn.size(); ++j) {
    CHECK(sn[j].support() == all[j].support());
    CHECK(sn[j].weights() == all[j].weights());
  }
}

TEST_CASE("invalid specs are configuration errors") {
  auto bad = PriorClassSpec::defaults(PriorClass::scale_normal);
  bad.gamma = 1.0;
  CHECK_THROWS_AS(build_dictionary(bad, kRegion), Error);
  bad = PriorClassSpec::defaults(PriorClass::unimodal);
  bad.a_max = bad.a_min;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = PriorClassSpec::defaults(PriorClass::all);
  bad.loc_std = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = PriorClassSpec::defaults(PriorClass::scale_normal);
  bad.atom_count = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("atomize examples") {
  auto g = atomize(CenteredNormal{1.0}, 2);
  REQUIRE(g.size() == 2);
  // Half-normal quantiles at 0.25 and 0.75 are normal quantiles at 0.625 and 0.875.
  CHECK(g.support()[0] == Approx(oracle::quantile(0.625)).epsilon(1e-12));
  CHECK(g.support()[1] == Approx(oracle::quantile(0.875)).epsilon(1e-12));
  CHECK(g.support()[0] == Approx(0.3186).epsilon(1e-4));
  CHECK(g.support()[1] == Approx(1.1503).epsilon(1e-4));
  CHECK(g.weights() == std::vector<double>{0.5, 0.5});

  auto p = atomize(PointMass{3.0}, 100);
  CHECK(p.size() == 1);
  CHECK(p.support()[0] == 3.0);

  auto u = atomize(CenteredUniform{2.0}, 4);
  std::vector<double> expect{0.25, 0.75, 1.25, 1.75};
  for (int k = 0; k < 4; ++k) {
    CHECK(u.support()[k] == Approx(expect[k]).epsilon(1e-15));
    CHECK(u.weights()[k] == 0.25);
  }
  CHECK_THROWS_AS(atomize(CenteredNormal{1.0}, 1), Error);
}

TEST_CASE("located normal atoms follow the folded distribution") {
  for (double m : {0.0, 0.03, 0.5, 6.0}) {
    auto g = atomize(LocatedNormal{m, 0.05}, 256);
    // E|N(m, s^2)| by quadrature.
    double s = 0.05;
    double mean = oracle::integrate(
        [&](double x) { return x * (oracle::pdf((x - m) / s) + oracle::pdf((x + m) / s)) / s; }, 0.0, m + 40 * s);
    double atoms = prior_integral(g, [](double x) { return x; });
    CHECK(atoms == Approx(mean).epsilon(2e-4));
    CHECK(std::is_sorted(g.support().begin(), g.support().end()));
  }
}

TEST_CASE("gamma atoms reproduce the mean") {
  auto g = atomize(GammaShape{3.0, 2.0}, 512);
  CHECK(prior_integral(g, [](double x) { return x; }) == Approx(1.5).epsilon(1e-3));
}

TEST_CASE("prior_integral examples") {
  auto d3 = AtomizedPrior::point_mass(3.0);
  CHECK(prior_integral(d3, [](double u) { return kRegion.probability(u); }) == Approx(0.8159400).epsilon(1e-6));
  auto g = atomize(CenteredNormal{1.0}, 512);
  CHECK(prior_integral(g, [](double) { return 1.0; }) == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(prior_integral(g, [](double u) { return u * u; }) - 1.0) < 2e-3);
  CHECK_THROWS_AS(prior_integral(g, [&g](double u) { return 1.0 / (u - g.support()[3]); }), Error);
  try {
    prior_integral(g, [](double) { return std::nan(""); });
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(std::string(e.what()).find("atom 0") != std::string::npos);
  }
}

TEST_CASE("scale-normal selection probability matches the closed form") {
  auto dict = build_dictionary(PriorClassSpec::defaults(PriorClass::scale_normal), kRegion);
  auto sigmas = geometric_grid(0.001, 100.0, 1.2);
  for (std::size_t j = 0; j < dict.size(); ++j) {
    double closed = 2.0 * (1.0 - oracle::cdf(2.1 / std::sqrt(1.0 + sigmas[j] * sigmas[j])));
    CHECK(std::abs(dict.selection_probs()[j] - closed) < 1e-3);
  }
}

TEST_CASE("weights sum to one and construction is deterministic") {
  for (auto cls : {PriorClass::scale_normal, PriorClass::unimodal, PriorClass::all, PriorClass::zcurve}) {
    auto a = build_dictionary(PriorClassSpec::defaults(cls), kRegion);
    auto b = build_dictionary(PriorClassSpec::defaults(cls), kRegion);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      double s = std::accumulate(a[j].weights().begin(), a[j].weights().end(), 0.0);
      CHECK(std::abs(s - 1.0) < 1e-12);
      CHECK(a[j].support() == b[j].support());
      CHECK(a[j].weights() == b[j].weights());
      CHECK(std::is_sorted(a[j].support().begin(), a[j].support().end()));
    }
  }
}

TEST_CASE("mix combines weighted atoms") {
  auto dict = build_dictionary(PriorClassSpec::defaults(PriorClass::zcurve), kRegion);
  std::vector<double> pi{0.5, 0, 0, 0.5, 0, 0, 0};
  auto g = mix(dict, pi);
  CHECK(g.support() == std::vector<double>{0.0, 3.0});
  CHECK(g.weights() == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(mix(dict, std::vector<double>{1.0}), Error);
}

TEST_CASE("atomized prior validation") {
  CHECK_THROWS_AS(AtomizedPrior({1.0, 2.0}, {0.5}), Error);
  CHECK_THROWS_AS(AtomizedPrior({-1.0}, {1.0}), Error);
  CHECK_THROWS_AS(AtomizedPrior({1.0, 2.0}, {0.7, 0.7}), Error);
  CHECK_THROWS_AS(AtomizedPrior({1.0, 2.0}, {-0.5, 1.5}), Error);
  AtomizedPrior g({3.0, 1.0}, {0.25, 0.75});
  CHECK(g.support() == std::vector<double>{1.0, 3.0});
  CHECK(g.weights() == std::vector<double>{0.75, 0.25});
}

TEST_CASE("prior class names") {
  CHECK(parse_prior_class("sn") == PriorClass::scale_normal);
  CHECK(parse_prior_class("unm") == PriorClass::unimodal);
  CHECK(parse_prior_class("all") == PriorClass::all);
  CHECK(parse_prior_class("zcurve") == PriorClass::zcurve);
  CHECK_THROWS_AS(parse_prior_class("foo"), Error);
}
