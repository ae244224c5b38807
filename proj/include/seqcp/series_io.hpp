#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqcp {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  long index() const noexcept { return year * 12L + (month - 1); }
  std::string str() const;

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Parses "YYYY-MM" or "YYYY-MM-DD" (the day is ignored).
YearMonth parse_year_month(std::string_view text);

struct SeriesRecord {
  YearMonth timestamp;
  double value = 0.0;
};

/// Reads a comma-separated file with a header row; timestamps come from the
/// `date` column, values from `value_column`. Rows must be strictly
/// increasing in time. Errors name the offending file line.
std::vector<SeriesRecord> load_csv(const std::filesystem::path& path,
                                   std::string_view value_column);
std::vector<SeriesRecord> parse_csv(std::istream& is,
                                    std::string_view value_column,
                                    const std::string& source);

void write_csv(std::ostream& os, std::span<const SeriesRecord> series,
               std::string_view value_column);

/// Pairs (last present, next present) around every missing month.
std::vector<std::pair<YearMonth, YearMonth>> find_gaps(
    std::span<const SeriesRecord> series);

/// Subtracts, from every record, the mean of its calendar slot (month for
/// period 12) computed over the first historic_len records only.
std::vector<SeriesRecord> deseasonalize(std::span<const SeriesRecord> series,
                                        long historic_len, int period = 12);

std::vector<double> values_of(std::span<const SeriesRecord> series);

}  // namespace seqcp
