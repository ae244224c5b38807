#include "seqcp/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "seqcp/error.hpp"

namespace seqcp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

YearMonth parse_year_month(std::string_view text) {
  const auto t = trim(text);
  const auto first = t.find('-');
  if (first == std::string_view::npos) {
    throw data_error("malformed date '" + std::string(text) + "'");
  }
  const auto second = t.find('-', first + 1);
  YearMonth ym;
  const auto month_text = t.substr(first + 1, second == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : second - first - 1);
  if (!parse_int(t.substr(0, first), ym.year) ||
      !parse_int(month_text, ym.month) || ym.month < 1 || ym.month > 12) {
    throw data_error("malformed date '" + std::string(text) + "'");
  }
  if (second != std::string_view::npos) {
    int day = 0;
    if (!parse_int(t.substr(second + 1), day) || day < 1 || day > 31) {
      throw data_error("malformed date '" + std::string(text) + "'");
    }
  }
  return ym;
}

std::vector<SeriesRecord> parse_csv(std::istream& is,
                                    std::string_view value_column,
                                    const std::string& source) {
  std::string line;
  long line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(is, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw data_error(source + ": missing header row");
  header = split_fields(header_line);

  auto column_index = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw data_error(source + ": missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = column_index("date");
  const std::size_t value_col = column_index(value_column);

  std::vector<SeriesRecord> out;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() <= std::max(date_col, value_col) ||
        fields[value_col].empty()) {
      throw data_error(where + ": missing value in column '" +
                       std::string(value_column) + "'");
    }
    SeriesRecord rec;
    try {
      rec.timestamp = parse_year_month(fields[date_col]);
    } catch (const Error& e) {
      throw data_error(where + ": " + e.what());
    }
    const std::string text(fields[value_col]);
    std::size_t used = 0;
    try {
      rec.value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(rec.value)) {
      throw data_error(where + ": cannot parse value '" + text + "'");
    }
    if (!out.empty() && !(out.back().timestamp < rec.timestamp)) {
      throw data_error(where + ": timestamps not increasing (" +
                       rec.timestamp.str() + " after " +
                       out.back().timestamp.str() + ")");
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<SeriesRecord> load_csv(const std::filesystem::path& path,
                                   std::string_view value_column) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open " + path.string());
  return parse_csv(is, value_column, path.string());
}

void write_csv(std::ostream& os, std::span<const SeriesRecord> series,
               std::string_view value_column) {
  os << "date," << value_column << '\n';
  char buf[40];
  for (const auto& r : series) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << r.timestamp.str() << ',' << buf << '\n';
  }
}

std::vector<std::pair<YearMonth, YearMonth>> find_gaps(
    std::span<const SeriesRecord> series) {
  std::vector<std::pair<YearMonth, YearMonth>> gaps;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].timestamp.index() - series[i - 1].timestamp.index() > 1) {
      gaps.emplace_back(series[i - 1].timestamp, series[i].timestamp);
    }
  }
  return gaps;
}

std::vector<SeriesRecord> deseasonalize(std::span<const SeriesRecord> series,
                                        long historic_len, int period) {
  if (period < 1) throw usage_error("period must be positive");
  if (historic_len < period) {
    throw usage_error("historic window shorter than one period");
  }
  if (static_cast<std::size_t>(historic_len) > series.size()) {
    throw data_error("series shorter than the historic window");
  }
  auto slot = [period](const SeriesRecord& r) {
    return static_cast<std::size_t>(r.timestamp.index() % period);
  };
  std::vector<double> sums(static_cast<std::size_t>(period), 0.0);
  std::vector<long> counts(static_cast<std::size_t>(period), 0);
  for (long i = 0; i < historic_len; ++i) {
    const auto& r = series[static_cast<std::size_t>(i)];
    sums[slot(r)] += r.value;
    ++counts[slot(r)];
  }
  for (int c = 0; c < period; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw data_error(
          (period == 12 ? "month " + std::to_string(c + 1)
                        : "seasonal slot " + std::to_string(c)) +
          " is absent from the historic window; cannot deseasonalize");
    }
  }
  std::vector<SeriesRecord> out(series.begin(), series.end());
  for (auto& r : out) {
    const auto c = slot(r);
    r.value -= sums[c] / static_cast<double>(counts[c]);
  }
  return out;
}

std::vector<double> values_of(std::span<const SeriesRecord> series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& r : series) out.push_back(r.value);
  return out;
}

}  // namespace seqcp
