#include "wolfcast/csv.hpp"

#include <sstream>

#include "wolfcast/kv_file.hpp"

namespace wolfcast::csv {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

TimeSeries parse_series(const std::string& text, std::size_t period_m, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;

    if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
    ++row;
    {
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || strip(line.substr(0, comma)) != "timestamp" ||
            strip(line.substr(comma + 1)) != "value") {
            throw SchemaError(origin + ": row 1: expected header 'timestamp,value'");
        }
    }

    TimeSeries ts;
    ts.period_m = period_m;
    std::vector<std::int64_t> stamps;
    while (std::getline(in, line)) {
        ++row;
        if (strip(line).empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw SchemaError(origin + ": row " + std::to_string(row) + ": expected 'timestamp,value'");
        }
        const std::string ts_text = strip(line.substr(0, comma));
        const std::string val_text = strip(line.substr(comma + 1));
        std::int64_t stamp = 0;
        try {
            stamp = parse_timestamp(ts_text);
        } catch (const SchemaError& e) {
            throw SchemaError(origin + ": row " + std::to_string(row) + ": " + e.what());
        }
        stamps.push_back(stamp);
        if (val_text.empty()) {
            ts.values.emplace_back(std::nullopt);
        } else {
            try {
                ts.values.emplace_back(kv::parse_double(val_text, "value"));
            } catch (const SchemaError&) {
                throw SchemaError(origin + ": row " + std::to_string(row) + ": malformed value '" +
                                  val_text + "'");
            }
        }
    }
    if (ts.values.empty()) throw SchemaError(origin + ": no data rows");

    ts.start = stamps.front();
    ts.step = ts.values.size() > 1 ? stamps[1] - stamps[0] : 1;
    if (ts.values.size() > 1 && ts.step <= 0) {
        throw SchemaError(origin + ": row 3: timestamps must be strictly increasing");
    }
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        if (stamps[i] - stamps[i - 1] != ts.step) {
            throw SchemaError(origin + ": row " + std::to_string(i + 2) +
                              ": non-uniform spacing (expected step " + std::to_string(ts.step) +
                              "s, got " + std::to_string(stamps[i] - stamps[i - 1]) + "s)");
        }
    }
    ts.validate();
    return ts;
}

TimeSeries read_series(const std::string& path, std::size_t period_m) {
    return parse_series(read_file(path), period_m, path);
}

std::string render_series(const TimeSeries& series) {
    std::string out = "timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_timestamp(series.timestamp_at(i));
        out += ',';
        if (series.values[i].has_value()) out += kv::format_double(*series.values[i]);
        out += '\n';
    }
    return out;
}

void write_series(const std::string& path, const TimeSeries& series) {
    write_file_atomic(path, render_series(series));
}

std::string render_forecast(const std::vector<ForecastRow>& rows) {
    const bool with_actual = !rows.empty() && rows.front().actual.has_value();
    std::string out = with_actual ? "timestamp,forecast,actual\n" : "timestamp,forecast\n";
    for (const auto& r : rows) {
        out += format_timestamp(r.timestamp);
        out += ',';
        out += kv::format_double(r.forecast);
        if (with_actual) {
            out += ',';
            if (r.actual.has_value()) out += kv::format_double(*r.actual);
        }
        out += '\n';
    }
    return out;
}

void write_forecast(const std::string& path, const std::vector<ForecastRow>& rows) {
    write_file_atomic(path, render_forecast(rows));
}

}  // namespace wolfcast::csv
