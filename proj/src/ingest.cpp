#include "tiltci/ingest.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <json.hpp>

#include "tiltci/errors.hpp"
#include "tiltci/io.hpp"

namespace tiltci {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Yields trimmed, non-empty, non-comment lines.
template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') f(line, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

CsvParse parse_ci_csv(std::string_view text) {
  CsvParse out;
  std::map<std::string, std::size_t> col;
  bool have_header = false;
  for_each_line(text, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
      for (const char* need : {"study_id", "lower", "upper"})
        if (!col.count(need)) fail(ErrorKind::parse, std::string("CSV header lacks column '") + need + "'");
      have_header = true;
      return;
    }
    ++out.n_rows;
    auto bad = [&](const std::string& why) {
      ++out.n_skipped;
      out.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    auto field = [&](const char* name) -> const std::string* {
      auto it = col.find(name);
      if (it == col.end() || it->second >= fields.size()) return nullptr;
      return &fields[it->second];
    };
    const auto* id = field("study_id");
    const auto* lo = field("lower");
    const auto* hi = field("upper");
    if (!id || !lo || !hi) return bad("missing fields");
    if (id->empty()) return bad("empty study_id");
    auto l = to_double(*lo), u = to_double(*hi);
    if (!l || !u) return bad("non-numeric bound");
    if (!(*l > 0.0 && *u > 0.0) || !std::isfinite(*l) || !std::isfinite(*u)) return bad("bounds must be positive");
    if (!(*l < *u)) return bad("lower >= upper");
    CiRecord rec{*id, *l, *u, std::nullopt};
    if (const auto* y = field("year"); y && !y->empty()) {
      int year = 0;
      auto res = std::from_chars(y->data(), y->data() + y->size(), year);
      if (res.ec != std::errc() || res.ptr != y->data() + y->size()) return bad("bad year");
      rec.year = year;
    }
    out.records.push_back(std::move(rec));
  });
  if (!have_header) fail(ErrorKind::insufficient, "CSV input is empty");
  return out;
}

ZRecord ci_to_z(const CiRecord& rec, double critical) {
  if (!(rec.lower > 0.0) || !(rec.upper > 0.0)) fail(ErrorKind::domain, "ci_to_z: bounds must be positive");
  if (!(rec.lower < rec.upper)) fail(ErrorKind::degenerate, "ci_to_z: lower must be < upper");
  if (!(critical > 0.0)) fail(ErrorKind::domain, "ci_to_z: critical value must be positive");
  const double ll = std::log(rec.lower), lu = std::log(rec.upper);
  const double se = (lu - ll) / (2.0 * critical);
  return {rec.study_id, (lu + ll) / (2.0 * se), se};
}

std::vector<CiRecord> dedupe_one_per_id(const std::vector<CiRecord>& records, std::uint64_t seed) {
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, fresh] = groups.try_emplace(records[i].study_id);
    if (fresh) order.push_back(records[i].study_id);
    it->second.push_back(i);
  }
  boost::random::mt19937_64 rng(seed);
  std::vector<CiRecord> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto& idx = groups[id];
    std::size_t pick = 0;
    if (idx.size() > 1) pick = boost::random::uniform_int_distribution<std::size_t>(0, idx.size() - 1)(rng);
    out.push_back(records[idx[pick]]);
  }
  return out;
}

FoldResult fold_and_truncate(const std::vector<ZRecord>& records, const SelectionRegion& region) {
  TruncationCounts counts;
  std::vector<double> kept;
  for (const auto& r : records) {
    const double a = std::abs(r.z);
    ++counts.n_published;
    if (a >= kCritical) ++counts.n_sig;
    if (region.contains(a)) kept.push_back(a);
  }
  counts.n_trun = static_cast<std::int64_t>(kept.size());
  if (kept.empty()) fail(ErrorKind::insufficient, "no z-scores fall inside the selection region " + region.to_string());
  return {TruncatedSample::make(std::move(kept), region), counts};
}

std::string IngestReport::to_json() const {
  nlohmann::ordered_json j{{"n_rows", n_rows},           {"n_parsed", n_parsed}, {"n_dedup", n_dedup},
                           {"n_published", n_published}, {"n_sig", n_sig},       {"n_trun", n_trun}};
  return j.dump(2) + "\n";
}

IngestReport IngestReport::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    IngestReport r;
    r.n_rows = j.at("n_rows");
    r.n_parsed = j.at("n_parsed");
    r.n_dedup = j.at("n_dedup");
    r.n_published = j.at("n_published");
    r.n_sig = j.at("n_sig");
    r.n_trun = j.at("n_trun");
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("ingestion report: ") + e.what());
  }
}

std::string zscores_to_csv(const std::vector<ZRecord>& records) {
  std::ostringstream os;
  os << "study_id,z,se\n";
  for (const auto& r : records) {
    bool quote = r.study_id.find_first_of(",\"") != std::string::npos;
    if (quote) {
      os << '"';
      for (char c : r.study_id) os << (c == '"' ? "\"\"" : std::string(1, c));
      os << '"';
    } else {
      os << r.study_id;
    }
    os << ',' << format_number(r.z) << ',' << format_number(r.se) << '\n';
  }
  return os.str();
}

std::vector<ZRecord> parse_zscore_csv(std::string_view text) {
  std::vector<ZRecord> out;
  std::optional<std::size_t> id_col, z_col, se_col;
  bool have_header = false;
  for_each_line(text, [&](const std::string& line, std::size_t line_no) {
    auto fields = split_csv_line(line);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "study_id") id_col = i;
        if (fields[i] == "z") z_col = i;
        if (fields[i] == "se") se_col = i;
      }
      if (!z_col) fail(ErrorKind::parse, "z-score CSV header lacks column 'z'");
      have_header = true;
      return;
    }
    if (*z_col >= fields.size()) fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing z");
    auto z = to_double(fields[*z_col]);
    if (!z || !std::isfinite(*z)) fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": bad z value");
    ZRecord r{id_col && *id_col < fields.size() ? fields[*id_col] : std::to_string(out.size() + 1), *z, 1.0};
    if (se_col && *se_col < fields.size())
      if (auto se = to_double(fields[*se_col])) r.se = *se;
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace tiltci
