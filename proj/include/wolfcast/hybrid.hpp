#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wolfcast/gwo.hpp"
#include "wolfcast/kv_file.hpp"
#include "wolfcast/lstm.hpp"
#include "wolfcast/metrics.hpp"
#include "wolfcast/preprocess.hpp"
#include "wolfcast/sarima.hpp"

namespace wolfcast::hybrid {

// Shape of the residual network; optimizer settings live in lstm::TrainConfig.
struct NetworkSpec {
    std::size_t hidden_size = 128;
    std::size_t num_layers = 3;
    std::size_t dense_size = 128;  // 0 disables the ReLU layer before the head
    lstm::CellKind cell = lstm::CellKind::lstm;

    void validate() const;
};

/**
 * The composed forecaster: a seasonal ARIMA fit on the training split plus
 * a recurrent network trained on its z-scored in-sample residuals.
 * residual_norm is fitted on training residuals only.
 */
struct HybridModel {
    sarima::SarimaFit sarima_fit;
    lstm::Network net;
    preprocess::NormParams residual_norm;
    std::size_t window_L = 0;
    preprocess::Split split;
    lstm::TrainResult history;
};

/**
 * Splits the series 80/10/10, fits the SARIMA on the training portion,
 * z-scores its residuals with training-portion parameters and trains the
 * network on residual windows of length window_L, early-stopping on the
 * validation portion's residuals. Fails if the training split yields
 * window_L or fewer residuals.
 */
HybridModel train_hybrid(const std::vector<double>& series, const sarima::SarimaOrder& order,
                         const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                         std::size_t window_L, const NetworkSpec& spec = {});

/**
 * h-step forecast from the end of the training split: the SARIMA forecast
 * plus the denormalized residual predictions, produced recursively (each
 * normalized prediction is appended to the window for the next step). The
 * composition is exactly additive.
 */
std::vector<double> forecast_hybrid(const HybridModel& model, std::size_t h);

enum class Segment { val, test };

/**
 * Forecasts from the end of the training split far enough to cover the
 * requested segment and scores that segment on the original scale.
 */
metrics::MetricsReport evaluate(const HybridModel& model, const std::vector<double>& series,
                                Segment segment);

// Model variants for the ablation harness.
enum class Mode { hybrid, sarima_only, arima, lstm_only, rnn_cell };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

/**
 * A trained model of any mode. hybrid/rnn_cell carry a full HybridModel;
 * sarima_only/arima carry just the SARIMA fit (arima with P = D = Q = 0);
 * lstm_only carries a network over the z-scored series itself plus the last
 * normalized training window to forecast from.
 */
struct Bundle {
    Mode mode = Mode::hybrid;
    std::size_t window_L = 0;
    preprocess::Split split;
    std::optional<HybridModel> full;
    std::optional<sarima::SarimaFit> sarima_fit;
    std::optional<lstm::Network> net;
    preprocess::NormParams series_norm;     // lstm_only
    std::vector<double> window_tail;        // lstm_only: last L normalized train values
    lstm::TrainResult history;
};

Bundle train_bundle(const std::vector<double>& series, Mode mode, const sarima::SarimaOrder& order,
                    const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                    std::size_t window_L, const NetworkSpec& spec = {});

// h-step forecast from the end of the bundle's training split.
std::vector<double> forecast_bundle(const Bundle& bundle, std::size_t h);

metrics::MetricsReport evaluate_bundle(const Bundle& bundle, const std::vector<double>& series,
                                       Segment segment);

struct FootprintReport {
    std::size_t parameter_count = 0;
    std::size_t flops_per_forecast = 0;  // multiply-add = 2 flops, activation = 1
};

FootprintReport footprint(const HybridModel& model);
FootprintReport footprint_bundle(const Bundle& bundle);

// Expanding-window rolling-origin folds: fold j in 1..k trains on the first
// floor(n*(0.5 + 0.4*j/k)) points and tests on the next floor(0.1*n).
struct CvFold {
    preprocess::IndexRange train;
    preprocess::IndexRange test;
};

std::vector<CvFold> cv_folds(std::size_t n, std::size_t k);

struct CvReport {
    std::vector<CvFold> folds;
    std::vector<metrics::MetricsReport> fold_metrics;
    std::vector<double> fold_rmse;
};

/**
 * Retrains a model of the given mode per fold and scores its forecasts over
 * the fold's test block.
 */
CvReport rolling_cv(const std::vector<double>& series, Mode mode, const sarima::SarimaOrder& order,
                    const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                    std::size_t window_L, const NetworkSpec& spec = {}, std::size_t k = 5);

/**
 * Two-sided paired t-test on per-fold error differences. Identical inputs
 * return exactly 1.0; a nonzero constant difference (zero variance) returns
 * the smallest positive normal double. Symmetric in its arguments.
 */
double compare_models(const std::vector<double>& errors_a, const std::vector<double>& errors_b);

// Report serialization (keys: mae, rmse, smape_percent, r2, n,
// parameter_count, flops_per_forecast; CV adds fold_<j>_<metric> and the
// caller may append pvalue_<a>_vs_<b> entries).
kv::Document eval_report_doc(const metrics::MetricsReport& report, const FootprintReport& fp);
kv::Document cv_report_doc(const CvReport& report);

}  // namespace wolfcast::hybrid
