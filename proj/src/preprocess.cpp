#include "wolfcast/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wolfcast/stats.hpp"

namespace wolfcast::preprocess {

std::size_t OutlierMask::count() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

OutlierMask detect_outliers(const TimeSeries& series, double sigma_k, double iqr_k) {
    series.validate();
    std::vector<double> present;
    present.reserve(series.size());
    for (const auto& v : series.values) {
        if (v.has_value()) present.push_back(*v);
    }
    if (present.size() < 4) {
        throw std::invalid_argument("detect_outliers: need at least 4 non-missing values, have " +
                                    std::to_string(present.size()));
    }

    const double mu = stats::mean(present);
    const double sd = stats::stddev_population(present);
    const double q1 = stats::quantile(present, 0.25);
    const double q3 = stats::quantile(present, 0.75);
    const double iqr = q3 - q1;
    const double lo_fence = q1 - iqr_k * iqr;
    const double hi_fence = q3 + iqr_k * iqr;

    const std::size_t n = series.size();
    OutlierMask mask;
    mask.flags.assign(n, false);
    mask.sigma_flags.assign(n, false);
    mask.iqr_flags.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (!series.values[i].has_value()) continue;
        const double x = *series.values[i];
        mask.sigma_flags[i] = std::fabs(x - mu) > sigma_k * sd;
        mask.iqr_flags[i] = x < lo_fence || x > hi_fence;
        mask.flags[i] = mask.sigma_flags[i] && mask.iqr_flags[i];
    }
    return mask;
}

TimeSeries apply_outlier_mask(const TimeSeries& series, const OutlierMask& mask) {
    if (mask.flags.size() != series.size()) {
        throw std::invalid_argument("apply_outlier_mask: mask/series length mismatch");
    }
    TimeSeries out = series;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (mask.flags[i]) out.values[i] = std::nullopt;
    }
    return out;
}

ImputeMethod impute_method(const TimeSeries& series, double knn_threshold) {
    const std::size_t missing = series.missing_count();
    if (missing == 0) return ImputeMethod::none;
    const double fraction = static_cast<double>(missing) / static_cast<double>(series.size());
    return fraction <= knn_threshold ? ImputeMethod::interpolation : ImputeMethod::knn;
}

namespace {

// Pads with the outermost available value when a side has fewer than k
// observed neighbours. `present` indices are sorted.
std::vector<double> knn_features(const TimeSeries& series, const std::vector<std::size_t>& present,
                                 std::size_t t, std::size_t k) {
    std::vector<double> f;
    f.reserve(2 * k + 1);
    // k nearest observed strictly before t (closest first).
    auto it = std::lower_bound(present.begin(), present.end(), t);
    {
        auto back = it;
        std::vector<double> lags;
        while (back != present.begin() && lags.size() < k) {
            --back;
            lags.push_back(*series.values[*back]);
        }
        while (lags.size() < k) lags.push_back(lags.empty() ? 0.0 : lags.back());
        f.insert(f.end(), lags.begin(), lags.end());
    }
    // k nearest observed strictly after t.
    {
        auto fwd = it;
        if (fwd != present.end() && *fwd == t) ++fwd;
        std::vector<double> leads;
        while (fwd != present.end() && leads.size() < k) {
            leads.push_back(*series.values[*fwd]);
            ++fwd;
        }
        while (leads.size() < k) leads.push_back(leads.empty() ? 0.0 : leads.back());
        f.insert(f.end(), leads.begin(), leads.end());
    }
    f.push_back(static_cast<double>(t % series.period_m));
    return f;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void fill_by_interpolation(TimeSeries& ts) {
    const std::size_t n = ts.size();
    std::size_t i = 0;
    while (i < n) {
        if (ts.values[i].has_value()) {
            ++i;
            continue;
        }
        const std::size_t gap_begin = i;
        while (i < n && !ts.values[i].has_value()) ++i;
        // Edges were pre-filled, so both neighbours exist.
        const std::size_t left = gap_begin - 1;
        const std::size_t right = i;
        const double lv = *ts.values[left];
        const double rv = *ts.values[right];
        const double span = static_cast<double>(right - left);
        for (std::size_t t = gap_begin; t < right; ++t) {
            ts.values[t] = lv + (rv - lv) * static_cast<double>(t - left) / span;
        }
    }
}

void fill_by_knn(TimeSeries& ts, std::size_t k) {
    std::vector<std::size_t> present;
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        (ts.values[i].has_value() ? present : missing).push_back(i);
    }
    std::vector<std::optional<double>> filled = ts.values;
    for (std::size_t t : missing) {
        const std::vector<double> ft = knn_features(ts, present, t, k);
        // (distance, donor index); ties resolved by lower index.
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(present.size());
        for (std::size_t j : present) {
            scored.emplace_back(squared_distance(ft, knn_features(ts, present, j, k)), j);
        }
        std::sort(scored.begin(), scored.end());
        const std::size_t use = std::min(k, scored.size());
        double sum = 0.0;
        for (std::size_t r = 0; r < use; ++r) sum += *ts.values[scored[r].second];
        filled[t] = sum / static_cast<double>(use);
    }
    ts.values = std::move(filled);
}

}  // namespace

TimeSeries impute(const TimeSeries& series, double knn_threshold, std::size_t k) {
    series.validate();
    if (k == 0) throw std::invalid_argument("impute: k must be positive");
    const std::size_t missing = series.missing_count();
    if (missing == series.size()) throw std::invalid_argument("impute: all values missing");
    if (missing == 0) return series;

    const ImputeMethod method = impute_method(series, knn_threshold);

    TimeSeries out = series;
    // Extend edges with the nearest observed value.
    std::size_t first = 0;
    while (!out.values[first].has_value()) ++first;
    for (std::size_t i = 0; i < first; ++i) out.values[i] = out.values[first];
    std::size_t last = out.size() - 1;
    while (!out.values[last].has_value()) --last;
    for (std::size_t i = last + 1; i < out.size(); ++i) out.values[i] = out.values[last];

    if (method == ImputeMethod::interpolation) {
        fill_by_interpolation(out);
    } else {
        fill_by_knn(out, k);
    }
    return out;
}

NormParams fit_norm_params(const std::vector<double>& values) {
    NormParams p;
    p.mu = stats::mean(values);
    p.sigma = stats::stddev_population(values);
    if (p.sigma == 0.0) {
        throw std::invalid_argument("zscore: zero variance, cannot normalize without supplied params");
    }
    return p;
}

std::vector<double> normalize(const std::vector<double>& values, const NormParams& params) {
    if (params.sigma <= 0.0) throw std::invalid_argument("normalize: sigma must be positive");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back((v - params.mu) / params.sigma);
    return out;
}

std::vector<double> denormalize(const std::vector<double>& values, const NormParams& params) {
    if (params.sigma <= 0.0) throw std::invalid_argument("denormalize: sigma must be positive");
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v * params.sigma + params.mu);
    return out;
}

std::pair<TimeSeries, NormParams> zscore(const TimeSeries& series,
                                         std::optional<NormParams> params) {
    const std::vector<double> dense = series.to_dense();
    const NormParams p = params.has_value() ? *params : fit_norm_params(dense);
    TimeSeries out = series;
    const std::vector<double> scaled = normalize(dense, p);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = scaled[i];
    return {out, p};
}

Split split(std::size_t n, double train_ratio, double val_ratio) {
    if (n < 10) throw std::invalid_argument("split: series too short (need >= 10, have " +
                                            std::to_string(n) + ")");
    const auto train_n = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n)));
    const auto val_n = static_cast<std::size_t>(std::floor(val_ratio * static_cast<double>(n)));
    Split s;
    s.train = {0, train_n};
    s.val = {train_n, train_n + val_n};
    s.test = {train_n + val_n, n};
    return s;
}

FeatureTable engineer_features(const TimeSeries& series, const std::vector<std::size_t>& lags,
                               const std::vector<std::size_t>& windows) {
    const std::vector<double> x = series.to_dense();
    std::size_t t_min = 0;
    for (std::size_t k : lags) {
        if (k == 0 || k >= x.size()) {
            throw std::invalid_argument("engineer_features: lag " + std::to_string(k) +
                                        " out of range for length " + std::to_string(x.size()));
        }
        t_min = std::max(t_min, k);
    }
    for (std::size_t w : windows) {
        if (w == 0 || w > x.size()) {
            throw std::invalid_argument("engineer_features: window " + std::to_string(w) +
                                        " out of range for length " + std::to_string(x.size()));
        }
        t_min = std::max(t_min, w - 1);
    }

    FeatureTable table;
    for (std::size_t k : lags) table.columns.push_back("lag_" + std::to_string(k));
    for (std::size_t w : windows) table.columns.push_back("ma_" + std::to_string(w));
    table.columns.push_back("seasonal_index");

    for (std::size_t t = t_min; t < x.size(); ++t) {
        std::vector<double> row;
        row.reserve(table.columns.size());
        for (std::size_t k : lags) row.push_back(x[t - k]);
        for (std::size_t w : windows) {
            double s = 0.0;
            for (std::size_t j = t + 1 - w; j <= t; ++j) s += x[j];
            row.push_back(s / static_cast<double>(w));
        }
        row.push_back(static_cast<double>(t % series.period_m));
        table.t_index.push_back(t);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<Window> make_windows(const std::vector<double>& values, std::size_t lookback) {
    if (lookback == 0) throw std::invalid_argument("make_windows: lookback must be positive");
    if (values.size() <= lookback) {
        throw std::invalid_argument("make_windows: need more than " + std::to_string(lookback) +
                                    " values, have " + std::to_string(values.size()));
    }
    std::vector<Window> out;
    out.reserve(values.size() - lookback);
    for (std::size_t j = 0; j + lookback < values.size(); ++j) {
        Window w;
        w.input.assign(values.begin() + static_cast<std::ptrdiff_t>(j),
                       values.begin() + static_cast<std::ptrdiff_t>(j + lookback));
        w.target = values[j + lookback];
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace wolfcast::preprocess
