#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace selfcma {

struct GenerationRecord {
  std::int64_t gen = 0;
  std::int64_t evals = 0;
  double best_f = 0.0;
  double median_f = 0.0;
  double sigma = 0.0;
  double c1 = 0.0;
  double cmu = 0.0;
  double cc = 0.0;
  std::string stop_reason;  // empty unless the segment stopped here

  bool operator==(const GenerationRecord&) const = default;
};

/// Per-generation trace of one run.
struct RunLog {
  std::vector<GenerationRecord> records;

  bool operator==(const RunLog&) const = default;
  bool empty() const noexcept { return records.empty(); }
};

inline constexpr std::string_view kRunLogHeader =
    "gen,evals,best_f,median_f,sigma,c1,cmu,cc,stop_reason";

/// 17 significant digits, '.' decimal point, independent of the C++ locale.
std::string format_double(double v);
/// Inverse of format_double (also accepts inf/nan). Throws Error(IoError).
double parse_double(std::string_view s);

void write_csv(std::ostream& out, const RunLog& log);
std::string to_csv(const RunLog& log);
/// Throws Error(IoError) on a malformed header or row.
RunLog parse_csv(std::istream& in);

/// Writes `contents` to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
RunLog read_csv_file(const std::filesystem::path& path);

/// Per generation index, the componentwise lower median over the logs that
/// still have a record at that index. For an even count k the value at
/// sorted position (k − 1) / 2 is taken. stop_reason is left empty.
/// Throws Error(EmptyInput) for no logs.
RunLog aggregate_medians(const std::vector<RunLog>& logs);

/// Lower median of a sample; Error(EmptyInput) when empty.
double lower_median(std::vector<double> values);

}  // namespace selfcma
