#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wolfcast/time_series.hpp"

namespace wolfcast::csv {

/**
 * Reads a `timestamp,value` CSV (header required, ISO-8601 timestamps, empty
 * value = missing). Rejects non-uniform spacing, naming the first irregular
 * row. Row numbers in errors are 1-based physical lines (header = row 1).
 */
TimeSeries read_series(const std::string& path, std::size_t period_m = 1);
TimeSeries parse_series(const std::string& text, std::size_t period_m, const std::string& origin);

std::string render_series(const TimeSeries& series);
void write_series(const std::string& path, const TimeSeries& series);

struct ForecastRow {
    std::int64_t timestamp = 0;
    double forecast = 0.0;
    std::optional<double> actual;
};

std::string render_forecast(const std::vector<ForecastRow>& rows);
void write_forecast(const std::string& path, const std::vector<ForecastRow>& rows);

}  // namespace wolfcast::csv
