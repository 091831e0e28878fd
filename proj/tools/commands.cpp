#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "tiltci/errors.hpp"
#include "tiltci/estimands.hpp"
#include "tiltci/floc.hpp"
#include "tiltci/ingest.hpp"
#include "tiltci/io.hpp"
#include "tiltci/poisson.hpp"
#include "tiltci/priors.hpp"
#include "tiltci/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace tiltci::cli {

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return kUsage;
    case ErrorKind::solver:
    case ErrorKind::empty_localization:
    case ErrorKind::numeric: return kSolver;
    default: return kData;
  }
}

int guarded(const char* cmd, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::cerr << "tiltci " << cmd << ": error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::empty_localization)
      std::cerr << "hint: try a richer --prior-class (sn < unm < all) or a smaller --alpha\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "tiltci " << cmd << ": I/O error: " << e.what() << '\n';
    return kData;
  }
}

std::string utc_timestamp() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs, std::uint64_t seed, const GlobalOptions& g) {
  json m;
  m["command"] = command;
  m["argv"] = g.argv;
  m["config"] = config;
  json hashes = json::object();
  for (const auto& path : inputs) hashes[path] = sha256_file(path);
  m["inputs"] = hashes;
  m["seed"] = seed;
  m["version"] = TILTCI_VERSION;
  m["timestamp"] = utc_timestamp();
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

SelectionRegion region_from(const std::string& region, double s_lower) {
  return region.empty() ? SelectionRegion::half_line(s_lower) : SelectionRegion::parse(region);
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::config, std::string("cannot parse ") + what + " '" + s + "'");
  }
}

Interval parse_pair(const std::string& text, const char* what) {
  auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::config, std::string(what) + " must look like lo:hi");
  return {parse_double(text.substr(0, colon), what), parse_double(text.substr(colon + 1), what)};
}

std::string band_file(const std::vector<IntervalResult>& rows) {
  std::ostringstream os;
  os << "# z lower upper\n";
  for (const auto& r : rows)
    os << format_number(r.z.value_or(std::nan(""))) << ' ' << format_number(r.lower) << ' '
       << format_number(r.upper) << '\n';
  return os.str();
}

json interval_json(Interval iv) { return json::array({iv.lo, iv.hi}); }

}  // namespace

std::vector<double> parse_z_grid(const std::string& text) {
  auto first = text.find(':');
  auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) fail(ErrorKind::config, "z grid must look like a:b:n");
  double a = parse_double(text.substr(0, first), "z grid start");
  double b = parse_double(text.substr(first + 1, second - first - 1), "z grid end");
  double n = parse_double(text.substr(second + 1), "z grid count");
  if (!(a >= 0.0) || !(b >= a) || n < 1 || n != std::floor(n))
    fail(ErrorKind::config, "z grid needs 0 <= a <= b and integer n >= 1");
  std::vector<double> z(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = z.size() == 1 ? a : a + (b - a) * i / (z.size() - 1);
  return z;
}

int cmd_ingest(const IngestOptions& o, const GlobalOptions& g) {
  return guarded("ingest", [&] {
    const auto region = region_from(o.region, o.s_lower);
    const double critical = normal_quantile(0.5 + o.ci_level / 2.0);
    auto parsed = parse_ci_csv(read_file(o.input));
    for (const auto& w : parsed.warnings) std::cerr << "warning: skipped " << w << '\n';
    if (parsed.records.empty()) fail(ErrorKind::insufficient, "no valid rows in " + o.input);
    auto deduped = dedupe_one_per_id(parsed.records, o.seed);
    std::vector<ZRecord> z;
    z.reserve(deduped.size());
    for (const auto& r : deduped) z.push_back(ci_to_z(r, critical));

    IngestReport report;
    report.n_rows = parsed.n_rows;
    report.n_parsed = static_cast<std::int64_t>(parsed.records.size());
    report.n_dedup = report.n_parsed - static_cast<std::int64_t>(deduped.size());
    auto folded = fold_and_truncate(z, region);
    report.n_published = folded.counts.n_published;
    report.n_sig = folded.counts.n_sig;
    report.n_trun = folded.counts.n_trun;

    const fs::path out(o.out);
    write_file(out / "zscores.csv", zscores_to_csv(z));
    write_file(out / "ingest_report.json", report.to_json());
    json cfg{{"input", o.input}, {"region", region.to_string()}, {"ci_level", o.ci_level}, {"critical", critical}};
    write_manifest(out, "ingest", cfg, {o.input}, o.seed, g);
    std::cout << report.to_json();
    return static_cast<int>(kOk);
  });
}

int cmd_analyze(const AnalyzeOptions& o, const GlobalOptions& g) {
  return guarded("analyze", [&] {
    const auto id = parse_estimand(o.estimand);
    if (id == EstimandId::poisson_post_mean) fail(ErrorKind::config, "use the butterfly command for count data");
    const auto region = region_from(o.region, o.s_lower);
    std::vector<double> zs = o.z_grid.empty() ? o.z : parse_z_grid(o.z_grid);
    if (takes_z(id) && zs.empty()) fail(ErrorKind::config, "estimand " + o.estimand + " needs --z or --z-grid");
    for (double z : zs)
      if (!(z >= 0.0)) fail(ErrorKind::config, "--z must be >= 0");

    auto records = parse_zscore_csv(read_file(o.zscores));
    auto folded = fold_and_truncate(records, region);
    auto spec = PriorClassSpec::defaults(parse_prior_class(o.prior_class));
    spec.atom_count = o.atoms;
    spec.loc_atom_count = o.loc_atoms;
    auto dict = build_dictionary(spec, region);
    auto problem = FLocProblem::build(dict, folded.sample, o.alpha, o.grid_points);

    const fs::path out(o.out);
    std::vector<std::string> inputs{o.zscores};
    json cfg{{"zscores", o.zscores},         {"estimand", o.estimand},   {"prior_class", to_string(spec.cls)},
             {"prior_spec", spec.canonical()}, {"alpha", o.alpha},         {"region", region.to_string()},
             {"grid_points", o.grid_points},  {"n_trun", folded.sample.n()}, {"radius", problem.radius()}};

    if (id == EstimandId::omega) {
      std::int64_t n_pub = folded.counts.n_published, n_sig = folded.counts.n_sig;
      fs::path report_path = o.report.empty() ? fs::path(o.zscores).parent_path() / "ingest_report.json"
                                              : fs::path(o.report);
      if (fs::exists(report_path)) {
        auto rep = IngestReport::from_json(read_file(report_path));
        n_pub = rep.n_published;
        n_sig = rep.n_sig;
        inputs.push_back(report_path.string());
      }
      auto om = floc_omega(problem, n_sig, n_pub);
      json j{{"estimand", "omega"},
             {"alpha", o.alpha},
             {"prior_class", to_string(spec.cls)},
             {"n_published", om.n_published},
             {"n_sig", n_sig},
             {"p_hat", om.p_hat},
             {"omega1", interval_json(om.omega1)},
             {"omega2", interval_json(om.omega2)},
             {"omega", interval_json(om.omega)}};
      IntervalResult row;
      row.estimand = "omega";
      row.lower = om.omega.lo;
      row.upper = om.omega.hi;
      row.alpha = o.alpha;
      row.prior_class = to_string(spec.cls);
      write_file(out / "omega.json", j.dump(2) + "\n");
      write_file(out / "intervals.csv", intervals_to_csv({row}));
      write_file(out / "intervals.json", intervals_to_json({row}));
      write_manifest(out, "analyze", cfg, inputs, 0, g);
      std::cout << j.dump(2) << '\n';
      return static_cast<int>(kOk);
    }

    std::vector<IntervalResult> rows;
    if (takes_z(id)) {
      rows = floc_band(problem, id, zs);
    } else {
      Interval bin = parse_pair(o.power_bin, "--power-bin");
      rows.push_back(solve_bounds(problem, make_estimand(id, std::nullopt, region, bin)));
    }
    write_file(out / "intervals.csv", intervals_to_csv(rows));
    write_file(out / "intervals.json", intervals_to_json(rows));
    if (!o.z_grid.empty()) write_file(out / "band.dat", band_file(rows));
    write_manifest(out, "analyze", cfg, inputs, 0, g);
    std::cout << intervals_to_csv(rows);
    int failed = 0;
    for (const auto& r : rows) failed += r.status == "empty_localization" || r.status == "error";
    if (failed == static_cast<int>(rows.size())) {
      std::cerr << "tiltci analyze: every evaluation point failed (" << rows.front().status << ")\n";
      return static_cast<int>(kSolver);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_simulate(const SimulateOptions& o, const GlobalOptions& g) {
  return guarded("simulate", [&] {
    SimConfig c;
    if (o.prior_support.size() != o.prior_weights.size())
      fail(ErrorKind::config, "prior_support and prior_weights differ in length");
    double total = 0.0;
    for (double w : o.prior_weights) total += w;
    std::vector<double> w(o.prior_weights);
    if (!(total > 0.0)) fail(ErrorKind::config, "prior_weights must have positive sum");
    for (auto& x : w) x /= total;
    std::vector<double> support;
    for (double u : o.prior_support) support.push_back(std::abs(u));
    c.true_prior = AtomizedPrior(support, w, "true prior");
    c.publication = {SelectionRegion::parse(o.pub_region), o.pub_inside, o.pub_outside};
    c.region = SelectionRegion::parse(o.region);
    c.n_all = o.n_all;
    c.n_reps = o.n_reps;
    c.alpha = o.alpha;
    c.estimands.clear();
    for (const auto& e : o.estimands) c.estimands.push_back(parse_estimand(e));
    c.z_grid = parse_z_grid(o.z_grid);
    c.seed = o.seed;
    c.prior_spec = PriorClassSpec::defaults(parse_prior_class(o.prior_class));
    c.run_floc = std::find(o.methods.begin(), o.methods.end(), "floc") != o.methods.end();
    c.run_bootstrap = std::find(o.methods.begin(), o.methods.end(), "bootstrap") != o.methods.end();
    c.bootstrap_b = o.bootstrap_b;
    c.bootstrap_max_iter = o.bootstrap_max_iter;
    c.em_max_iter = o.em_max_iter;
    c.em_tol = o.em_tol;
    c.grid_points = o.grid_points;
    c.threads = g.threads;

    auto report = mc_coverage(c);
    const fs::path out(o.out);
    write_file(out / "coverage.csv", report.to_csv());
    write_file(out / "coverage.json", report.to_json());
    json cfg{{"n_all", o.n_all},
             {"n_reps", o.n_reps},
             {"alpha", o.alpha},
             {"prior_support", o.prior_support},
             {"prior_weights", o.prior_weights},
             {"pub_region", o.pub_region},
             {"pub_inside", o.pub_inside},
             {"pub_outside", o.pub_outside},
             {"region", o.region},
             {"estimands", o.estimands},
             {"z_grid", o.z_grid},
             {"prior_class", o.prior_class},
             {"methods", o.methods},
             {"bootstrap_b", o.bootstrap_b},
             {"bootstrap_max_iter", o.bootstrap_max_iter},
             {"em_max_iter", o.em_max_iter},
             {"em_tol", o.em_tol},
             {"grid_points", o.grid_points}};
    write_manifest(out, "simulate", cfg, {o.config}, o.seed, g);
    std::cout << report.to_csv();
    return static_cast<int>(kOk);
  });
}

int cmd_butterfly(const ButterflyOptions& o, const GlobalOptions& g) {
  return guarded("butterfly", [&] {
    auto sample = parse_count_csv(read_file(o.counts));
    auto problem = build_poisson_problem(sample, o.alpha, poisson_support(o.support_points));
    std::vector<IntervalResult> rows;
    std::ostringstream csv;
    csv << "z,lower,upper,zipf,status\n";
    for (int z = 1; z <= o.z_max; ++z) {
      IntervalResult r;
      try {
        r = solve_bounds(problem, poisson_posterior_mean_functional(z));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::empty_localization) throw;
        r.estimand = "poisson_post_mean";
        r.z = z;
        r.lower = r.upper = std::nan("");
        r.alpha = o.alpha;
        r.prior_class = problem.prior_class();
        r.status = "empty_localization";
      }
      csv << z << ',' << format_number(r.lower) << ',' << format_number(r.upper) << ',' << z << ',' << r.status
          << '\n';
      rows.push_back(std::move(r));
    }
    const fs::path out(o.out);
    write_file(out / "butterfly.csv", csv.str());
    write_file(out / "intervals.json", intervals_to_json(rows));
    write_file(out / "band.dat", band_file(rows));
    json cfg{{"counts", o.counts},
             {"alpha", o.alpha},
             {"z_max", o.z_max},
             {"support_points", o.support_points},
             {"n_species", sample.counts.size()},
             {"radius", problem.radius()}};
    write_manifest(out, "butterfly", cfg, {o.counts}, 0, g);
    std::cout << csv.str();
    return static_cast<int>(kOk);
  });
}

}  // namespace tiltci::cli
