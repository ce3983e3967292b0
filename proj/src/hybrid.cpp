#include "wolfcast/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wolfcast/stats.hpp"

namespace wolfcast::hybrid {

namespace {

std::vector<double> prefix(const std::vector<double>& series, std::size_t end) {
    return std::vector<double>(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(end));
}

// Norm params that tolerate a constant vector: nothing to scale, so sigma 1
// maps everything to zero and the network sees (and learns) a flat signal.
preprocess::NormParams safe_norm(const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return preprocess::NormParams{*lo, 1.0};
    return preprocess::fit_norm_params(values);
}

// Splits supervised windows into train/val sets by target index.
void assign_windows(const std::vector<preprocess::Window>& windows, std::size_t window_L,
                    std::size_t train_count, std::vector<std::vector<double>>& train_x,
                    std::vector<double>& train_y, std::vector<std::vector<double>>& val_x,
                    std::vector<double>& val_y) {
    for (std::size_t j = 0; j < windows.size(); ++j) {
        const std::size_t target_index = j + window_L;
        if (target_index < train_count) {
            train_x.push_back(windows[j].input);
            train_y.push_back(windows[j].target);
        } else {
            val_x.push_back(windows[j].input);
            val_y.push_back(windows[j].target);
        }
    }
}

// Recursive one-step predictions in normalized space, denormalized on exit.
std::vector<double> recursive_forecast(const lstm::Network& net, std::vector<double> window,
                                       const preprocess::NormParams& norm, std::size_t h) {
    std::vector<double> out;
    out.reserve(h);
    for (std::size_t s = 0; s < h; ++s) {
        const double pred = lstm::forward(net, window);
        out.push_back(pred * norm.sigma + norm.mu);
        window.erase(window.begin());
        window.push_back(pred);
    }
    return out;
}

std::size_t net_forward_flops(const lstm::Network& net, std::size_t window_L) {
    const std::size_t H = net.hidden_size;
    std::size_t per_step = 0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::size_t cols = H + net.layers[l].input_size;
        if (net.cell == lstm::CellKind::lstm) {
            // four affine blocks, four activations, the cell update
            // (2 mul + 1 add), tanh(C') and the output product
            per_step += 4 * 2 * H * cols + 4 * H + 3 * H + H + H;
        } else {
            per_step += 2 * H * cols + H;
        }
    }
    std::size_t flops = per_step * window_L;
    if (net.dense_size > 0) flops += 2 * net.dense_size * H + net.dense_size;
    flops += 2 * net.head_w.size();
    return flops;
}

std::size_t sarima_step_flops(const sarima::SarimaOrder& order) {
    // the constant, one multiply-add per AR/MA term, one add per
    // integration stage
    return 1 +
           2 * static_cast<std::size_t>(order.p + order.q + order.P + order.Q) +
           static_cast<std::size_t>(order.d + order.D);
}

const preprocess::IndexRange& segment_range(const preprocess::Split& split, Segment segment) {
    return segment == Segment::val ? split.val : split.test;
}

metrics::MetricsReport score_segment(const std::vector<double>& series,
                                     const preprocess::Split& split, Segment segment,
                                     const std::vector<double>& forecast_from_train_end) {
    const preprocess::IndexRange& seg = segment_range(split, segment);
    if (seg.length() == 0) throw std::invalid_argument("hybrid: requested segment is empty");
    if (series.size() < seg.end)
        throw std::invalid_argument("hybrid: series shorter than the model's split");
    const std::vector<double> actual(series.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                                     series.begin() + static_cast<std::ptrdiff_t>(seg.end));
    const std::size_t offset = seg.begin - split.train.end;
    const std::vector<double> predicted(
        forecast_from_train_end.begin() + static_cast<std::ptrdiff_t>(offset),
        forecast_from_train_end.begin() + static_cast<std::ptrdiff_t>(offset + seg.length()));
    return metrics::compute(actual, predicted);
}

}  // namespace

void NetworkSpec::validate() const {
    if (hidden_size < 1) throw std::invalid_argument("hybrid: hidden_size must be >= 1");
    if (num_layers < 1) throw std::invalid_argument("hybrid: num_layers must be >= 1");
}

HybridModel train_hybrid(const std::vector<double>& series, const sarima::SarimaOrder& order,
                         const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                         std::size_t window_L, const NetworkSpec& spec) {
    spec.validate();
    if (window_L < 1) throw std::invalid_argument("hybrid: window_L must be >= 1");

    HybridModel model;
    model.window_L = window_L;
    model.split = preprocess::split(series.size());
    model.sarima_fit = sarima::fit(prefix(series, model.split.train.end), order, gwo_config);

    const std::vector<double>& r_train = model.sarima_fit.residuals;
    if (r_train.size() <= window_L)
        throw std::invalid_argument("hybrid: training split yields " +
                                    std::to_string(r_train.size()) +
                                    " residuals, need more than window_L = " +
                                    std::to_string(window_L));
    model.residual_norm = safe_norm(r_train);

    // Residuals across train+val (the fit is fixed; this just filters the
    // extra values), normalized with training-only parameters.
    const std::vector<double> r_all =
        sarima::residuals(model.sarima_fit, prefix(series, model.split.val.end));
    const std::vector<double> rn_all = preprocess::normalize(r_all, model.residual_norm);

    std::vector<std::vector<double>> train_x, val_x;
    std::vector<double> train_y, val_y;
    assign_windows(preprocess::make_windows(rn_all, window_L), window_L, r_train.size(), train_x,
                   train_y, val_x, val_y);

    model.net = lstm::make_network(spec.cell, 1, spec.hidden_size, spec.num_layers,
                                   spec.dense_size, derive_seed(train_config.seed, 1));
    model.history = lstm::train(model.net, train_x, train_y, val_x, val_y, train_config);
    return model;
}

std::vector<double> forecast_hybrid(const HybridModel& model, std::size_t h) {
    if (h < 1) throw std::invalid_argument("hybrid: forecast horizon must be >= 1");
    const std::vector<double>& r = model.sarima_fit.residuals;
    if (r.size() < model.window_L)
        throw std::invalid_argument("hybrid: fewer stored residuals than the window length");
    std::vector<double> window(r.end() - static_cast<std::ptrdiff_t>(model.window_L), r.end());
    for (double& v : window) v = (v - model.residual_norm.mu) / model.residual_norm.sigma;

    std::vector<double> out = sarima::forecast(model.sarima_fit, h);
    const std::vector<double> resid = recursive_forecast(model.net, std::move(window),
                                                         model.residual_norm, h);
    for (std::size_t s = 0; s < h; ++s) out[s] += resid[s];
    return out;
}

metrics::MetricsReport evaluate(const HybridModel& model, const std::vector<double>& series,
                                Segment segment) {
    const std::size_t h = segment_range(model.split, segment).end - model.split.train.end;
    return score_segment(series, model.split, segment, forecast_hybrid(model, h));
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::hybrid: return "hybrid";
        case Mode::sarima_only: return "sarima_only";
        case Mode::arima: return "arima";
        case Mode::lstm_only: return "lstm_only";
        case Mode::rnn_cell: return "rnn_cell";
    }
    throw std::logic_error("hybrid: unknown mode");
}

Mode mode_from_name(const std::string& name) {
    if (name == "hybrid") return Mode::hybrid;
    if (name == "sarima_only") return Mode::sarima_only;
    if (name == "arima") return Mode::arima;
    if (name == "lstm_only") return Mode::lstm_only;
    if (name == "rnn_cell") return Mode::rnn_cell;
    throw SchemaError("hybrid: unknown mode '" + name +
                      "' (expected hybrid, sarima_only, arima, lstm_only or rnn_cell)");
}

Bundle train_bundle(const std::vector<double>& series, Mode mode, const sarima::SarimaOrder& order,
                    const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                    std::size_t window_L, const NetworkSpec& spec) {
    Bundle bundle;
    bundle.mode = mode;
    bundle.window_L = window_L;
    switch (mode) {
        case Mode::hybrid:
        case Mode::rnn_cell: {
            NetworkSpec s = spec;
            s.cell = mode == Mode::rnn_cell ? lstm::CellKind::rnn_tanh : lstm::CellKind::lstm;
            bundle.full = train_hybrid(series, order, gwo_config, train_config, window_L, s);
            bundle.split = bundle.full->split;
            bundle.history = bundle.full->history;
            break;
        }
        case Mode::sarima_only:
        case Mode::arima: {
            sarima::SarimaOrder o = order;
            if (mode == Mode::arima) o.P = o.D = o.Q = 0;
            bundle.split = preprocess::split(series.size());
            bundle.sarima_fit = sarima::fit(prefix(series, bundle.split.train.end), o, gwo_config);
            break;
        }
        case Mode::lstm_only: {
            spec.validate();
            if (window_L < 1) throw std::invalid_argument("hybrid: window_L must be >= 1");
            bundle.split = preprocess::split(series.size());
            if (bundle.split.train.end <= window_L)
                throw std::invalid_argument("hybrid: training split no longer than window_L");
            const std::vector<double> train_vals = prefix(series, bundle.split.train.end);
            bundle.series_norm = safe_norm(train_vals);
            const std::vector<double> normed =
                preprocess::normalize(prefix(series, bundle.split.val.end), bundle.series_norm);

            std::vector<std::vector<double>> train_x, val_x;
            std::vector<double> train_y, val_y;
            assign_windows(preprocess::make_windows(normed, window_L), window_L,
                           bundle.split.train.end, train_x, train_y, val_x, val_y);

            lstm::Network net = lstm::make_network(spec.cell, 1, spec.hidden_size, spec.num_layers,
                                                   spec.dense_size, derive_seed(train_config.seed, 1));
            bundle.history = lstm::train(net, train_x, train_y, val_x, val_y, train_config);
            bundle.net = std::move(net);
            bundle.window_tail.assign(
                normed.begin() + static_cast<std::ptrdiff_t>(bundle.split.train.end - window_L),
                normed.begin() + static_cast<std::ptrdiff_t>(bundle.split.train.end));
            break;
        }
    }
    return bundle;
}

std::vector<double> forecast_bundle(const Bundle& bundle, std::size_t h) {
    if (h < 1) throw std::invalid_argument("hybrid: forecast horizon must be >= 1");
    switch (bundle.mode) {
        case Mode::hybrid:
        case Mode::rnn_cell:
            return forecast_hybrid(*bundle.full, h);
        case Mode::sarima_only:
        case Mode::arima:
            return sarima::forecast(*bundle.sarima_fit, h);
        case Mode::lstm_only:
            return recursive_forecast(*bundle.net, bundle.window_tail, bundle.series_norm, h);
    }
    throw std::logic_error("hybrid: unknown mode");
}

metrics::MetricsReport evaluate_bundle(const Bundle& bundle, const std::vector<double>& series,
                                       Segment segment) {
    const std::size_t h = segment_range(bundle.split, segment).end - bundle.split.train.end;
    return score_segment(series, bundle.split, segment, forecast_bundle(bundle, h));
}

FootprintReport footprint(const HybridModel& model) {
    FootprintReport fp;
    fp.parameter_count = model.sarima_fit.order.coeff_count() + lstm::parameter_count(model.net);
    fp.flops_per_forecast =
        net_forward_flops(model.net, model.window_L) + sarima_step_flops(model.sarima_fit.order);
    return fp;
}

FootprintReport footprint_bundle(const Bundle& bundle) {
    switch (bundle.mode) {
        case Mode::hybrid:
        case Mode::rnn_cell:
            return footprint(*bundle.full);
        case Mode::sarima_only:
        case Mode::arima: {
            FootprintReport fp;
            fp.parameter_count = bundle.sarima_fit->order.coeff_count();
            fp.flops_per_forecast = sarima_step_flops(bundle.sarima_fit->order);
            return fp;
        }
        case Mode::lstm_only: {
            FootprintReport fp;
            fp.parameter_count = lstm::parameter_count(*bundle.net);
            fp.flops_per_forecast = net_forward_flops(*bundle.net, bundle.window_L);
            return fp;
        }
    }
    throw std::logic_error("hybrid: unknown mode");
}

std::vector<CvFold> cv_folds(std::size_t n, std::size_t k) {
    if (k < 1) throw std::invalid_argument("hybrid: fold count must be >= 1");
    const std::size_t test_len = n / 10;
    if (test_len < 1)
        throw std::invalid_argument("hybrid: series of length " + std::to_string(n) +
                                    " is too short for rolling cross-validation");
    std::vector<CvFold> folds;
    for (std::size_t j = 1; j <= k; ++j) {
        // floor(n * (0.5 + 0.4 * j / k)) computed exactly in integers
        const std::size_t train_end = (5 * k * n + 4 * n * j) / (10 * k);
        CvFold fold;
        fold.train = {0, train_end};
        fold.test = {train_end, train_end + test_len};
        folds.push_back(fold);
    }
    return folds;
}

CvReport rolling_cv(const std::vector<double>& series, Mode mode, const sarima::SarimaOrder& order,
                    const gwo::GwoConfig& gwo_config, const lstm::TrainConfig& train_config,
                    std::size_t window_L, const NetworkSpec& spec, std::size_t k) {
    CvReport report;
    report.folds = cv_folds(series.size(), k);
    for (const CvFold& fold : report.folds) {
        const Bundle bundle = train_bundle(prefix(series, fold.train.end), mode, order, gwo_config,
                                           train_config, window_L, spec);
        // The bundle forecasts from its internal training boundary; extend
        // the horizon to span the fold's test block and keep that block.
        const std::size_t h = fold.test.end - bundle.split.train.end;
        const std::vector<double> all = forecast_bundle(bundle, h);
        const std::vector<double> predicted(all.end() - static_cast<std::ptrdiff_t>(fold.test.length()),
                                            all.end());
        const std::vector<double> actual(
            series.begin() + static_cast<std::ptrdiff_t>(fold.test.begin),
            series.begin() + static_cast<std::ptrdiff_t>(fold.test.end));
        report.fold_metrics.push_back(metrics::compute(actual, predicted));
        report.fold_rmse.push_back(report.fold_metrics.back().rmse);
    }
    return report;
}

double compare_models(const std::vector<double>& errors_a, const std::vector<double>& errors_b) {
    if (errors_a.size() != errors_b.size())
        throw std::invalid_argument("hybrid: mismatched fold counts");
    if (errors_a.size() < 2)
        throw std::invalid_argument("hybrid: need at least 2 folds to compare models");
    std::vector<double> diffs(errors_a.size());
    bool all_zero = true;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        diffs[i] = errors_a[i] - errors_b[i];
        if (diffs[i] != 0.0) all_zero = false;
    }
    if (all_zero) return 1.0;  // identical performance by convention
    const double sd = stats::stddev_sample(diffs);
    if (sd == 0.0) return std::numeric_limits<double>::min();  // degenerate t, capped
    const double n = static_cast<double>(diffs.size());
    const double t = stats::mean(diffs) / (sd / std::sqrt(n));
    const double p = stats::student_t_two_sided_p(t, n - 1.0);
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

kv::Document eval_report_doc(const metrics::MetricsReport& report, const FootprintReport& fp) {
    kv::Document doc;
    doc.set("mae", report.mae);
    doc.set("rmse", report.rmse);
    doc.set("smape_percent", report.smape_percent);
    doc.set("r2", report.r2);
    doc.set("n", static_cast<std::int64_t>(report.n));
    doc.set("parameter_count", static_cast<std::int64_t>(fp.parameter_count));
    doc.set("flops_per_forecast", static_cast<std::int64_t>(fp.flops_per_forecast));
    return doc;
}

kv::Document cv_report_doc(const CvReport& report) {
    kv::Document doc;
    doc.set("k", static_cast<std::int64_t>(report.folds.size()));
    for (std::size_t j = 0; j < report.fold_metrics.size(); ++j) {
        const std::string tag = "fold_" + std::to_string(j + 1) + "_";
        const metrics::MetricsReport& m = report.fold_metrics[j];
        doc.set(tag + "mae", m.mae);
        doc.set(tag + "rmse", m.rmse);
        doc.set(tag + "smape_percent", m.smape_percent);
        doc.set(tag + "r2", m.r2);
        doc.set(tag + "n", static_cast<std::int64_t>(m.n));
    }
    return doc;
}

}  // namespace wolfcast::hybrid
