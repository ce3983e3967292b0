#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wolfcast/time_series.hpp"

namespace wolfcast::preprocess {

/**
 * Outlier flags from the two detectors. `flags` holds the joint decision:
 * a point is an outlier only when both criteria agree.
 */
struct OutlierMask {
    std::vector<bool> flags;
    std::vector<bool> sigma_flags;
    std::vector<bool> iqr_flags;

    std::size_t count() const;
};

struct NormParams {
    double mu = 0.0;
    double sigma = 1.0;  // > 0
};

// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t length() const { return end - begin; }
};

struct Split {
    IndexRange train;
    IndexRange val;
    IndexRange test;
};

/**
 * Flags values where |x - mean| > sigma_k * std (population std over the
 * non-missing values) AND x lies outside the Tukey fences
 * [Q1 - iqr_k*IQR, Q3 + iqr_k*IQR]. Missing entries are never flagged.
 * Requires at least 4 non-missing values.
 */
OutlierMask detect_outliers(const TimeSeries& series, double sigma_k = 3.0, double iqr_k = 1.5);

// Returns a copy with every jointly flagged value set to missing.
TimeSeries apply_outlier_mask(const TimeSeries& series, const OutlierMask& mask);

/**
 * Fills every missing value. Leading/trailing gaps are first extended with
 * the nearest observed value. If the missing fraction is at most
 * `knn_threshold`, interior gaps are linearly interpolated between their
 * observed neighbours; above the threshold each gap is filled by k-nearest-
 * neighbour regression (feature vector: the k nearest observed values on
 * each side, padded with the outermost one near the edges, plus the seasonal
 * index t mod m; Euclidean distance; mean of the k closest donors).
 */
TimeSeries impute(const TimeSeries& series, double knn_threshold = 0.03, std::size_t k = 5);

// Imputation route chosen by the threshold rule; exposed for reporting.
enum class ImputeMethod { none, interpolation, knn };
ImputeMethod impute_method(const TimeSeries& series, double knn_threshold = 0.03);

/**
 * Z-score normalization: (x - mu) / sigma with population sigma. When
 * `params` is absent they are computed from the input; a zero-variance
 * series is then an error. When normalizing validation/test data, pass the
 * training-split params so no information leaks across the split.
 */
std::pair<TimeSeries, NormParams> zscore(const TimeSeries& series,
                                         std::optional<NormParams> params = std::nullopt);

std::vector<double> normalize(const std::vector<double>& values, const NormParams& params);
std::vector<double> denormalize(const std::vector<double>& values, const NormParams& params);
NormParams fit_norm_params(const std::vector<double>& values);

/**
 * Chronological 80/10/10 split (floor arithmetic, test absorbs the rounding
 * slack). Requires length >= 10.
 */
Split split(std::size_t n, double train_ratio = 0.8, double val_ratio = 0.1);

struct FeatureTable {
    std::vector<std::string> columns;
    std::vector<std::size_t> t_index;        // original time index per row
    std::vector<std::vector<double>> rows;   // row-major, matches columns
};

/**
 * Lagged values, trailing moving averages and the seasonal index t mod m.
 * Rows whose lags or windows reach before the start of the series are
 * dropped.
 */
FeatureTable engineer_features(const TimeSeries& series, const std::vector<std::size_t>& lags,
                               const std::vector<std::size_t>& windows);

struct Window {
    std::vector<double> input;  // length L
    double target = 0.0;
};

// Supervised windows: sample j covers values[j .. j+L) with target values[j+L].
std::vector<Window> make_windows(const std::vector<double>& values, std::size_t lookback);

}  // namespace wolfcast::preprocess
