#include "wolfcast/time_series.hpp"

#include <cstdio>
#include <stdexcept>

#include "wolfcast/kv_file.hpp"

namespace wolfcast {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yy + (m <= 2);
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    char sep = 'T';
    int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &year, &month, &day, &sep, &hour,
                        &minute, &second);
    bool ok = false;
    std::size_t expected_len = 0;
    if (n == 3) {
        ok = true;
        expected_len = text.size();  // date-only, verified below via reformat
    } else if (n == 7 && (sep == 'T' || sep == ' ')) {
        ok = true;
        expected_len = 19;
    }
    if (ok && n == 3 && text.size() != 10) ok = false;
    if (ok && n == 7) {
        std::size_t len = text.size();
        if (len == expected_len + 1 && text.back() == 'Z') len -= 1;
        if (len != expected_len) ok = false;
    }
    if (ok) {
        ok = month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour >= 0 && hour < 24 &&
             minute >= 0 && minute < 60 && second >= 0 && second < 60;
    }
    if (!ok) {
        throw SchemaError("malformed timestamp '" + text + "' (expected ISO-8601, e.g. 2021-01-31T06:00:00)");
    }
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t y = 0;
    int m = 0, d = 0;
    civil_from_days(days, y, m, d);
    const int hh = static_cast<int>(rem / 3600);
    const int mm = static_cast<int>((rem % 3600) / 60);
    const int ss = static_cast<int>(rem % 60);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02d", static_cast<long long>(y),
                  m, d, hh, mm, ss);
    return buf;
}

std::size_t TimeSeries::missing_count() const {
    std::size_t n = 0;
    for (const auto& v : values) {
        if (!v.has_value()) ++n;
    }
    return n;
}

std::vector<double> TimeSeries::to_dense() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].has_value()) {
            throw std::invalid_argument("to_dense: missing value at index " + std::to_string(i));
        }
        out.push_back(*values[i]);
    }
    return out;
}

TimeSeries TimeSeries::from_dense(std::vector<double> dense, std::int64_t start, std::int64_t step,
                                  std::size_t period_m) {
    TimeSeries ts;
    ts.start = start;
    ts.step = step;
    ts.period_m = period_m;
    ts.values.reserve(dense.size());
    for (double v : dense) ts.values.emplace_back(v);
    ts.validate();
    return ts;
}

void TimeSeries::validate() const {
    if (values.empty()) throw std::invalid_argument("TimeSeries: length must be >= 1");
    if (step <= 0) throw std::invalid_argument("TimeSeries: step must be positive");
    if (period_m < 1) throw std::invalid_argument("TimeSeries: period_m must be >= 1");
}

}  // namespace wolfcast
