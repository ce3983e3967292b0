#include "wolfcast/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wolfcast::metrics {

namespace {

void check_lengths(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.empty()) throw std::invalid_argument("metrics: empty input");
    if (actual.size() != predicted.size())
        throw std::invalid_argument("metrics: length mismatch (" + std::to_string(actual.size()) +
                                    " vs " + std::to_string(predicted.size()) + ")");
}

}  // namespace

double mae(const std::vector<double>& actual, const std::vector<double>& predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) acc += std::abs(actual[i] - predicted[i]);
    return acc / static_cast<double>(actual.size());
}

double rmse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

double smape_percent(const std::vector<double>& actual, const std::vector<double>& predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = (std::abs(actual[i]) + std::abs(predicted[i])) / 2.0;
        if (denom > 0.0) acc += std::abs(actual[i] - predicted[i]) / denom;
        // both exactly zero: a perfect prediction contributes 0
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

double r2(const std::vector<double>& actual, const std::vector<double>& predicted) {
    check_lengths(actual, predicted);
    double mean = 0.0;
    for (double y : actual) mean += y;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = actual[i] - predicted[i];
        const double d = actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0)
        throw std::invalid_argument("metrics: r2 is undefined for constant actual values");
    return 1.0 - ss_res / ss_tot;
}

MetricsReport compute(const std::vector<double>& actual, const std::vector<double>& predicted) {
    MetricsReport report;
    report.mae = mae(actual, predicted);
    report.rmse = rmse(actual, predicted);
    report.smape_percent = smape_percent(actual, predicted);
    report.r2 = r2(actual, predicted);
    report.n = actual.size();
    return report;
}

}  // namespace wolfcast::metrics
