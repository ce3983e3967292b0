#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wolfcast {

// Epoch seconds (UTC) <-> "YYYY-MM-DDTHH:MM:SS". Date-only input is accepted
// and treated as midnight; a trailing 'Z' is tolerated.
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t epoch_seconds);

/**
 * Uniformly spaced observations. Missing entries are represented explicitly
 * via std::nullopt, never as sentinel numbers.
 */
struct TimeSeries {
    std::int64_t start = 0;   // epoch seconds of the first observation
    std::int64_t step = 1;    // seconds between observations, > 0
    std::size_t period_m = 1; // seasonal length (e.g. 7 daily, 24 hourly)
    std::vector<std::optional<double>> values;

    std::size_t size() const { return values.size(); }
    std::int64_t timestamp_at(std::size_t i) const {
        return start + static_cast<std::int64_t>(i) * step;
    }

    std::size_t missing_count() const;
    bool complete() const { return missing_count() == 0; }

    // Dense view; throws std::invalid_argument if any value is missing.
    std::vector<double> to_dense() const;

    static TimeSeries from_dense(std::vector<double> values, std::int64_t start = 0,
                                 std::int64_t step = 1, std::size_t period_m = 1);

    // Checks length >= 1, step > 0, period_m >= 1; throws on violation.
    void validate() const;
};

}  // namespace wolfcast
