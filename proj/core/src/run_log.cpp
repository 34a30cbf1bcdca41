#include "selfcma/run_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "selfcma/error.hpp"

namespace selfcma {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::IoError, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::IoError, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void write_csv(std::ostream& out, const RunLog& log) {
  out << kRunLogHeader << '\n';
  for (const GenerationRecord& r : log.records) {
    out << r.gen << ',' << r.evals << ',' << format_double(r.best_f) << ','
        << format_double(r.median_f) << ',' << format_double(r.sigma) << ','
        << format_double(r.c1) << ',' << format_double(r.cmu) << ',' << format_double(r.cc) << ','
        << r.stop_reason << '\n';
  }
}

std::string to_csv(const RunLog& log) {
  std::ostringstream out;
  write_csv(out, log);
  return out.str();
}

RunLog parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunLogHeader) {
    throw Error(ErrorCode::IoError, "run log header mismatch: '" + line + "'");
  }
  RunLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) {
      throw Error(ErrorCode::IoError, "line " + std::to_string(lineno) + ": expected 9 fields");
    }
    log.records.push_back({parse_int(f[0]), parse_int(f[1]), parse_double(f[2]),
                           parse_double(f[3]), parse_double(f[4]), parse_double(f[5]),
                           parse_double(f[6]), parse_double(f[7]), std::string(f[8])});
  }
  return log;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename to " + path.string() + ": " + ec.message());
}

RunLog read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_csv(in);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "median of nothing");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

RunLog aggregate_medians(const std::vector<RunLog>& logs) {
  if (logs.empty()) throw Error(ErrorCode::EmptyInput, "aggregate_medians of no logs");
  std::size_t longest = 0;
  for (const RunLog& l : logs) longest = std::max(longest, l.records.size());

  RunLog out;
  out.records.reserve(longest);
  std::vector<const GenerationRecord*> alive;
  for (std::size_t g = 0; g < longest; ++g) {
    alive.clear();
    for (const RunLog& l : logs) {
      if (g < l.records.size()) alive.push_back(&l.records[g]);
    }
    const auto median_of = [&](auto field) {
      std::vector<double> v;
      v.reserve(alive.size());
      for (const GenerationRecord* r : alive) v.push_back(static_cast<double>(field(*r)));
      return lower_median(std::move(v));
    };
    GenerationRecord m;
    m.gen = static_cast<std::int64_t>(median_of([](const auto& r) { return r.gen; }));
    m.evals = static_cast<std::int64_t>(median_of([](const auto& r) { return r.evals; }));
    m.best_f = median_of([](const auto& r) { return r.best_f; });
    m.median_f = median_of([](const auto& r) { return r.median_f; });
    m.sigma = median_of([](const auto& r) { return r.sigma; });
    m.c1 = median_of([](const auto& r) { return r.c1; });
    m.cmu = median_of([](const auto& r) { return r.cmu; });
    m.cc = median_of([](const auto& r) { return r.cc; });
    out.records.push_back(std::move(m));
  }
  return out;
}

}  // namespace selfcma
