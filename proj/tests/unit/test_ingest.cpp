#include <doctest.h>

#include <cmath>

#include "tiltci/errors.hpp"
#include "tiltci/ingest.hpp"

using namespace tiltci;
using doctest::Approx;

namespace {
const auto kRegion = SelectionRegion::half_line(2.1);
}

TEST_CASE("ci_to_z examples") {
  auto r = ci_to_z({"a", 0.52, 0.96, std::nullopt});
  double se = (std::log(0.96) - std::log(0.52)) / (2 * 1.96);
  CHECK(r.se == Approx(se).epsilon(1e-14));
  CHECK(r.se == Approx(0.15640).epsilon(1e-4));
  CHECK(r.z == Approx(-2.221).epsilon(2e-4));
  CHECK(ci_to_z({"b", 0.5, 2.0, std::nullopt}).z == 0.0);
  const double a = 1.0, s = 0.5;
  auto inv = ci_to_z({"c", std::exp(a - 1.96 * s), std::exp(a + 1.96 * s), std::nullopt});
  CHECK(std::abs(inv.se - 0.5) < 1e-12);
  CHECK(std::abs(inv.z - 2.0) < 1e-12);
  for (double aa : {-3.0, -0.2, 0.7, 4.0})
    for (double ss : {0.01, 0.3, 2.0}) {
      auto q = ci_to_z({"d", std::exp(aa - 1.96 * ss), std::exp(aa + 1.96 * ss), std::nullopt});
      CHECK(std::abs(q.se - ss) < 1e-12);
      CHECK(std::abs(q.z * q.se - aa) < 1e-12);
    }
}

TEST_CASE("ci_to_z errors") {
  try {
    ci_to_z({"a", 1.0, 1.0, std::nullopt});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate);
  }
  try {
    ci_to_z({"a", 0.0, 1.0, std::nullopt});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(ci_to_z({"a", 2.0, 1.0, std::nullopt}), Error);
}

TEST_CASE("dedupe examples") {
  std::vector<CiRecord> three{{"x", 0.5, 0.9, {}}, {"x", 0.6, 0.9, {}}, {"x", 0.7, 0.9, {}}};
  auto a = dedupe_one_per_id(three, 7);
  auto b = dedupe_one_per_id(three, 7);
  REQUIRE(a.size() == 1);
  CHECK(a[0].lower == b[0].lower);
  std::vector<CiRecord> distinct{{"p", 0.5, 0.9, {}}, {"q", 0.6, 0.9, {}}, {"r", 0.7, 0.9, {}}};
  auto d = dedupe_one_per_id(distinct, 1);
  REQUIRE(d.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(d[i].study_id == distinct[i].study_id);
  CHECK(dedupe_one_per_id({}, 3).empty());
}

TEST_CASE("dedupe draws each duplicate with equal frequency") {
  std::vector<CiRecord> three{{"x", 0.5, 0.9, {}}, {"x", 0.6, 0.9, {}}, {"x", 0.7, 0.9, {}}};
  int count[3] = {0, 0, 0};
  const int trials = 3000;
  for (int s = 0; s < trials; ++s) {
    double lo = dedupe_one_per_id(three, s)[0].lower;
    count[lo == 0.5 ? 0 : lo == 0.6 ? 1 : 2]++;
  }
  for (int c : count) CHECK(std::abs(c - trials / 3.0) < 4 * std::sqrt(trials * (1 / 3.0) * (2 / 3.0)));
}

TEST_CASE("fold_and_truncate examples") {
  std::vector<ZRecord> zs{{"a", -2.22, 1}, {"b", 1.0, 1}, {"c", 3.0, 1}};
  auto r = fold_and_truncate(zs, kRegion);
  CHECK(r.sample.values == std::vector<double>{2.22, 3.0});
  CHECK(r.counts.n_published == 3);
  CHECK(r.counts.n_sig == 2);
  CHECK(r.counts.n_trun == 2);
  CHECK_THROWS_AS(fold_and_truncate({{"a", 1.0, 1}, {"b", -2.0, 1}}, kRegion), Error);
  auto edge = fold_and_truncate({{"a", -2.1, 1}}, kRegion);
  CHECK(edge.sample.values == std::vector<double>{2.1});
}

TEST_CASE("fold_and_truncate keeps exactly the inputs inside the region") {
  std::vector<ZRecord> zs;
  std::size_t inside = 0;
  for (int i = -400; i <= 400; ++i) {
    double z = i * 0.0173;
    zs.push_back({"s" + std::to_string(i), z, 1});
    inside += std::abs(z) >= 2.1;
  }
  auto r = fold_and_truncate(zs, kRegion);
  CHECK(r.sample.values.size() == inside);
  CHECK(std::is_sorted(r.sample.values.begin(), r.sample.values.end()));
}

TEST_CASE("CSV parsing") {
  std::string text =
      "# comment\n"
      "upper,study_id,lower,year\n"
      "0.96,\"s1, quoted\",0.52,2001\n"
      "\n"
      "2.0,s2,0.5,\n"
      "bad,s3,0.5,1999\n"
      "1.5,s4\n";
  auto p = parse_ci_csv(text);
  CHECK(p.n_rows == 4);
  CHECK(p.n_skipped == 2);
  REQUIRE(p.records.size() == 2);
  CHECK(p.records[0].study_id == "s1, quoted");
  CHECK(p.records[0].lower == 0.52);
  CHECK(p.records[0].year == 2001);
  CHECK(!p.records[1].year);
  CHECK(p.warnings.size() == 2);
  CHECK_THROWS_AS(parse_ci_csv("id,lower,upper\n1,2,3\n"), Error);
  try {
    parse_ci_csv("");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient);
  }
  CHECK(split_csv_line("a,\"b\"\"c\",d") == std::vector<std::string>{"a", "b\"c", "d"});
}

TEST_CASE("z-score CSV and report round-trip") {
  std::vector<ZRecord> zs{{"a", -2.25, 0.1}, {"b", 3.5, 0.25}};
  auto back = parse_zscore_csv(zscores_to_csv(zs));
  REQUIRE(back.size() == 2);
  CHECK(back[0].study_id == "a");
  CHECK(back[0].z == -2.25);
  CHECK(back[1].se == 0.25);
  auto bare = parse_zscore_csv("z\n2.5\n-3\n");
  CHECK(bare.size() == 2);

  IngestReport rep{10, 9, 1, 8, 5, 4};
  auto r2 = IngestReport::from_json(rep.to_json());
  CHECK(r2.n_rows == 10);
  CHECK(r2.n_parsed == 9);
  CHECK(r2.n_dedup == 1);
  CHECK(r2.n_published == 8);
  CHECK(r2.n_sig == 5);
  CHECK(r2.n_trun == 4);
  CHECK(rep.to_json() == r2.to_json());
}

TEST_CASE("pipeline is deterministic given input and seed") {
  std::string text = "study_id,lower,upper\n";
  for (int i = 0; i < 200; ++i)
    text += "id" + std::to_string(i % 150) + "," + std::to_string(0.3 + 0.002 * i) + "," +
            std::to_string(0.9 + 0.01 * i) + "\n";
  auto run = [&] {
    auto recs = dedupe_one_per_id(parse_ci_csv(text).records, 99);
    std::vector<ZRecord> zs;
    for (const auto& r : recs) zs.push_back(ci_to_z(r));
    return zscores_to_csv(zs);
  };
  CHECK(run() == run());
  CHECK(dedupe_one_per_id(parse_ci_csv(text).records, 99).size() == 150);
}
