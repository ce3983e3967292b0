#pragma once

#include <cstddef>
#include <vector>

namespace wolfcast::metrics {

struct MetricsReport {
    double mae = 0.0;
    double rmse = 0.0;
    double smape_percent = 0.0;  // in [0, 200]
    double r2 = 0.0;             // <= 1, and 1 only for a perfect fit
    std::size_t n = 0;
};

// All four accept equal, non-empty actual/predicted vectors.
double mae(const std::vector<double>& actual, const std::vector<double>& predicted);
double rmse(const std::vector<double>& actual, const std::vector<double>& predicted);

/**
 * Symmetric mean absolute percentage error, reported in percent:
 * 100 * mean of |y - yhat| / ((|y| + |yhat|) / 2), with a term defined as 0
 * when both values are exactly zero.
 */
double smape_percent(const std::vector<double>& actual, const std::vector<double>& predicted);

// Coefficient of determination; rejects constant actuals (zero variance).
double r2(const std::vector<double>& actual, const std::vector<double>& predicted);

MetricsReport compute(const std::vector<double>& actual, const std::vector<double>& predicted);

}  // namespace wolfcast::metrics
