#pragma once

// Confidence-interval corpora to truncated absolute z-scores.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tiltci/floc.hpp"

namespace tiltci {

struct CiRecord {
  std::string study_id;
  double lower;
  double upper;
  std::optional<int> year;
};

struct ZRecord {
  std::string study_id;
  double z;
  double se;
};

/// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvParse {
  std::vector<CiRecord> records;
  std::int64_t n_rows = 0;     // data rows seen (excluding header, blank and '#' lines)
  std::int64_t n_skipped = 0;  // malformed rows
  std::vector<std::string> warnings;
};

/// Header required: study_id,lower,upper[,year] in any column order.
CsvParse parse_ci_csv(std::string_view text);

/// critical is the normal quantile matching the nominal CI level (1.96 for 95%).
ZRecord ci_to_z(const CiRecord& rec, double critical = kCritical);

/// Keeps one record per study id, drawn uniformly with the seed; output in
/// order of each id's first appearance.
std::vector<CiRecord> dedupe_one_per_id(const std::vector<CiRecord>& records, std::uint64_t seed);

struct TruncationCounts {
  std::int64_t n_published = 0;
  std::int64_t n_sig = 0;  // |z| >= 1.96
  std::int64_t n_trun = 0;
};

struct FoldResult {
  TruncatedSample sample;
  TruncationCounts counts;
};

FoldResult fold_and_truncate(const std::vector<ZRecord>& records, const SelectionRegion& region);

struct IngestReport {
  std::int64_t n_rows = 0;
  std::int64_t n_parsed = 0;
  std::int64_t n_dedup = 0;  // records removed as duplicates
  std::int64_t n_published = 0;
  std::int64_t n_sig = 0;
  std::int64_t n_trun = 0;

  std::string to_json() const;
  static IngestReport from_json(std::string_view text);
};

std::string zscores_to_csv(const std::vector<ZRecord>& records);
/// Reads study_id,z[,se]; a bare single column of z values is also accepted.
std::vector<ZRecord> parse_zscore_csv(std::string_view text);

}  // namespace tiltci
