#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wolfcast/csv.hpp"
#include "wolfcast/gwo.hpp"
#include "wolfcast/hybrid.hpp"
#include "wolfcast/kv_file.hpp"
#include "wolfcast/preprocess.hpp"
#include "wolfcast/run_config.hpp"
#include "wolfcast/sarima.hpp"
#include "wolfcast/synth.hpp"
#include "wolfcast/time_series.hpp"

namespace fs = std::filesystem;
using namespace wolfcast;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

void note_written(const std::string& path) { std::cout << "wrote " << path << "\n"; }

std::string impute_method_name(preprocess::ImputeMethod method) {
    switch (method) {
        case preprocess::ImputeMethod::none: return "none";
        case preprocess::ImputeMethod::interpolation: return "interpolation";
        case preprocess::ImputeMethod::knn: return "knn";
    }
    return "none";
}

std::string render_history(const lstm::TrainResult& history) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e)
        out << (e + 1) << ',' << kv::format_double(history.train_loss[e]) << ','
            << kv::format_double(history.val_loss[e]) << '\n';
    return out.str();
}

// ----- model directory layout -------------------------------------------

kv::Document meta_doc(const hybrid::Bundle& bundle, const TimeSeries& series) {
    kv::Document doc;
    doc.set("format", "wolfcast-model/1");
    doc.set("mode", hybrid::mode_name(bundle.mode));
    doc.set("m", static_cast<std::int64_t>(series.period_m));
    doc.set("window_L", static_cast<std::int64_t>(bundle.window_L));
    doc.set("train_end", static_cast<std::int64_t>(bundle.split.train.end));
    doc.set("val_end", static_cast<std::int64_t>(bundle.split.val.end));
    doc.set("test_end", static_cast<std::int64_t>(bundle.split.test.end));
    doc.set("timeline_start", static_cast<std::int64_t>(series.start));
    doc.set("timeline_step", static_cast<std::int64_t>(series.step));
    if (bundle.mode == hybrid::Mode::hybrid || bundle.mode == hybrid::Mode::rnn_cell) {
        doc.set("norm_mu", bundle.full->residual_norm.mu);
        doc.set("norm_sigma", bundle.full->residual_norm.sigma);
    } else if (bundle.mode == hybrid::Mode::lstm_only) {
        doc.set("norm_mu", bundle.series_norm.mu);
        doc.set("norm_sigma", bundle.series_norm.sigma);
        doc.set_doubles("window_tail", bundle.window_tail);
    }
    return doc;
}

void write_bundle(const hybrid::Bundle& bundle, const TimeSeries& series, const std::string& dir) {
    ensure_dir(dir);
    // materialize every file's content before writing anything
    const std::string meta = meta_doc(bundle, series).str();
    std::optional<std::string> sarima_text, lstm_text;
    switch (bundle.mode) {
        case hybrid::Mode::hybrid:
        case hybrid::Mode::rnn_cell:
            sarima_text = sarima::write(bundle.full->sarima_fit);
            lstm_text = lstm::write(bundle.full->net);
            break;
        case hybrid::Mode::sarima_only:
        case hybrid::Mode::arima:
            sarima_text = sarima::write(*bundle.sarima_fit);
            break;
        case hybrid::Mode::lstm_only:
            lstm_text = lstm::write(*bundle.net);
            break;
    }
    const std::string history = render_history(bundle.history);

    const std::string meta_path = join(dir, "model.meta.txt");
    write_file_atomic(meta_path, meta);
    note_written(meta_path);
    if (sarima_text) {
        const std::string path = join(dir, "model.sarima.txt");
        write_file_atomic(path, *sarima_text);
        note_written(path);
    }
    if (lstm_text) {
        const std::string path = join(dir, "model.lstm.txt");
        write_file_atomic(path, *lstm_text);
        note_written(path);
    }
    const std::string history_path = join(dir, "history.csv");
    write_file_atomic(history_path, history);
    note_written(history_path);
}

struct LoadedModel {
    hybrid::Bundle bundle;
    std::size_t m = 1;
    std::int64_t timeline_start = 0;
    std::int64_t timeline_step = 1;
};

LoadedModel load_bundle(const std::string& dir) {
    const kv::Document meta = kv::Document::load(join(dir, "model.meta.txt"));
    if (meta.get("format") != "wolfcast-model/1")
        throw SchemaError("unsupported model format '" + meta.get("format") + "'");
    LoadedModel loaded;
    hybrid::Bundle& bundle = loaded.bundle;
    bundle.mode = hybrid::mode_from_name(meta.get("mode"));
    bundle.window_L = static_cast<std::size_t>(meta.get_int("window_L"));
    bundle.split.train = {0, static_cast<std::size_t>(meta.get_int("train_end"))};
    bundle.split.val = {bundle.split.train.end, static_cast<std::size_t>(meta.get_int("val_end"))};
    bundle.split.test = {bundle.split.val.end, static_cast<std::size_t>(meta.get_int("test_end"))};
    loaded.m = static_cast<std::size_t>(meta.get_int("m"));
    loaded.timeline_start = meta.get_int("timeline_start");
    loaded.timeline_step = meta.get_int("timeline_step");

    switch (bundle.mode) {
        case hybrid::Mode::hybrid:
        case hybrid::Mode::rnn_cell: {
            hybrid::HybridModel model;
            model.sarima_fit = sarima::read(read_file(join(dir, "model.sarima.txt")));
            model.net = lstm::read(read_file(join(dir, "model.lstm.txt")));
            model.residual_norm.mu = meta.get_double("norm_mu");
            model.residual_norm.sigma = meta.get_double("norm_sigma");
            model.window_L = bundle.window_L;
            model.split = bundle.split;
            bundle.full = std::move(model);
            break;
        }
        case hybrid::Mode::sarima_only:
        case hybrid::Mode::arima:
            bundle.sarima_fit = sarima::read(read_file(join(dir, "model.sarima.txt")));
            break;
        case hybrid::Mode::lstm_only:
            bundle.net = lstm::read(read_file(join(dir, "model.lstm.txt")));
            bundle.series_norm.mu = meta.get_double("norm_mu");
            bundle.series_norm.sigma = meta.get_double("norm_sigma");
            bundle.window_tail = meta.get_doubles("window_tail");
            if (bundle.window_tail.size() != bundle.window_L)
                throw SchemaError("model meta: window_tail length does not match window_L");
            break;
    }
    return loaded;
}

// ----- commands -----------------------------------------------------------

int cmd_preprocess(const std::string& input, const std::string& out_dir, const RunConfig& cfg) {
    const TimeSeries raw = csv::read_series(input, cfg.m);
    const preprocess::OutlierMask mask = preprocess::detect_outliers(raw);
    const TimeSeries masked = preprocess::apply_outlier_mask(raw, mask);
    const preprocess::ImputeMethod method = preprocess::impute_method(masked);
    const TimeSeries cleaned = preprocess::impute(masked);

    kv::Document report;
    report.set("outlier_count", static_cast<std::int64_t>(mask.count()));
    report.set("missing_before", static_cast<std::int64_t>(raw.missing_count()));
    report.set("missing_after_masking", static_cast<std::int64_t>(masked.missing_count()));
    report.set("imputation_method", impute_method_name(method));
    report.set("missing_after", static_cast<std::int64_t>(cleaned.missing_count()));

    ensure_dir(out_dir);
    const std::string cleaned_path = join(out_dir, "cleaned.csv");
    csv::write_series(cleaned_path, cleaned);
    note_written(cleaned_path);
    const std::string report_path = join(out_dir, "preprocess_report.txt");
    report.save(report_path);
    note_written(report_path);
    return 0;
}

int cmd_fit(const std::string& input, const std::string& out_dir, RunConfig cfg, bool select_order) {
    const TimeSeries ts = csv::read_series(input, cfg.m);
    const std::vector<double> values = ts.to_dense();

    if (select_order && cfg.mode != hybrid::Mode::lstm_only) {
        const preprocess::Split sp = preprocess::split(values.size());
        const std::vector<double> train(values.begin(),
                                        values.begin() + static_cast<std::ptrdiff_t>(sp.train.end));
        const std::vector<double> val(values.begin() + static_cast<std::ptrdiff_t>(sp.train.end),
                                      values.begin() + static_cast<std::ptrdiff_t>(sp.val.end));
        cfg.order = sarima::select_order(train, val, cfg.order, cfg.gwo);
        std::cout << "selected order (" << cfg.order.p << "," << cfg.order.d << "," << cfg.order.q
                  << ")(" << cfg.order.P << "," << cfg.order.D << "," << cfg.order.Q << ")_"
                  << cfg.order.m << "\n";
    }

    const hybrid::Bundle bundle = hybrid::train_bundle(values, cfg.mode, cfg.order, cfg.gwo,
                                                       cfg.train, cfg.window_L, cfg.net);
    write_bundle(bundle, ts, out_dir);
    return 0;
}

int cmd_forecast(const std::string& model_dir, const std::string& out_dir, std::size_t horizon,
                 const std::optional<std::string>& actual_path) {
    const LoadedModel loaded = load_bundle(model_dir);
    const std::vector<double> forecast = hybrid::forecast_bundle(loaded.bundle, horizon);

    std::optional<TimeSeries> actual;
    if (actual_path) actual = csv::read_series(*actual_path, loaded.m);

    std::vector<csv::ForecastRow> rows(horizon);
    const std::size_t origin_index = loaded.bundle.split.train.end;
    for (std::size_t s = 0; s < horizon; ++s) {
        csv::ForecastRow& row = rows[s];
        row.timestamp = loaded.timeline_start +
                        static_cast<std::int64_t>(origin_index + s) * loaded.timeline_step;
        row.forecast = forecast[s];
        if (actual) {
            const std::int64_t offset = row.timestamp - actual->start;
            if (offset >= 0 && offset % actual->step == 0) {
                const std::size_t idx = static_cast<std::size_t>(offset / actual->step);
                if (idx < actual->size() && actual->values[idx]) row.actual = *actual->values[idx];
            }
        }
    }
    ensure_dir(out_dir);
    const std::string path = join(out_dir, "forecast.csv");
    csv::write_forecast(path, rows);
    note_written(path);
    return 0;
}

int cmd_evaluate(const std::string& input, const std::string& out_dir, const RunConfig& cfg,
                 hybrid::Segment segment) {
    const TimeSeries ts = csv::read_series(input, cfg.m);
    const std::vector<double> values = ts.to_dense();
    const hybrid::Bundle bundle = hybrid::train_bundle(values, cfg.mode, cfg.order, cfg.gwo,
                                                       cfg.train, cfg.window_L, cfg.net);
    const metrics::MetricsReport report = hybrid::evaluate_bundle(bundle, values, segment);
    const hybrid::FootprintReport fp = hybrid::footprint_bundle(bundle);

    // plot data: the evaluated segment's actuals next to the forecasts
    const preprocess::IndexRange seg =
        segment == hybrid::Segment::val ? bundle.split.val : bundle.split.test;
    const std::vector<double> all =
        hybrid::forecast_bundle(bundle, seg.end - bundle.split.train.end);
    std::vector<csv::ForecastRow> rows(seg.length());
    for (std::size_t i = 0; i < seg.length(); ++i) {
        rows[i].timestamp = ts.timestamp_at(seg.begin + i);
        rows[i].forecast = all[seg.begin + i - bundle.split.train.end];
        rows[i].actual = values[seg.begin + i];
    }

    ensure_dir(out_dir);
    const std::string report_path = join(out_dir, "eval_report.txt");
    hybrid::eval_report_doc(report, fp).save(report_path);
    note_written(report_path);
    const std::string plot_path = join(out_dir, "eval_plot.csv");
    csv::write_forecast(plot_path, rows);
    note_written(plot_path);
    return 0;
}

int cmd_cv(const std::string& input, const std::string& out_dir, const RunConfig& cfg,
           const std::optional<std::string>& compare_mode) {
    const TimeSeries ts = csv::read_series(input, cfg.m);
    const std::vector<double> values = ts.to_dense();
    const hybrid::CvReport primary = hybrid::rolling_cv(values, cfg.mode, cfg.order, cfg.gwo,
                                                        cfg.train, cfg.window_L, cfg.net, cfg.cv_k);
    kv::Document doc = hybrid::cv_report_doc(primary);

    std::optional<kv::Document> compare_doc;
    if (compare_mode) {
        const hybrid::Mode other = hybrid::mode_from_name(*compare_mode);
        const hybrid::CvReport secondary = hybrid::rolling_cv(
            values, other, cfg.order, cfg.gwo, cfg.train, cfg.window_L, cfg.net, cfg.cv_k);
        const double p = hybrid::compare_models(primary.fold_rmse, secondary.fold_rmse);
        doc.set("pvalue_" + hybrid::mode_name(cfg.mode) + "_vs_" + hybrid::mode_name(other), p);
        compare_doc = hybrid::cv_report_doc(secondary);
    }

    ensure_dir(out_dir);
    const std::string report_path = join(out_dir, "cv_report.txt");
    doc.save(report_path);
    note_written(report_path);
    if (compare_doc) {
        const std::string compare_path = join(out_dir, "cv_compare_" + *compare_mode + ".txt");
        compare_doc->save(compare_path);
        note_written(compare_path);
    }
    return 0;
}

int cmd_synth(const std::string& out_dir, const RunConfig& cfg) {
    const synth::SyntheticSeries data = synth::generate(cfg.synth);
    const std::int64_t start = parse_timestamp("2021-01-01T00:00:00");
    const std::int64_t step = 3600;
    const TimeSeries ts = TimeSeries::from_dense(data.series, start, step, cfg.synth.period);

    ensure_dir(out_dir);
    const std::string series_path = join(out_dir, "series.csv");
    csv::write_series(series_path, ts);
    note_written(series_path);
    const std::string components_path = join(out_dir, "components.csv");
    write_file_atomic(components_path, synth::render_components(data, start, step));
    note_written(components_path);
    return 0;
}

int cmd_gwo_bench(const std::string& out_dir, const RunConfig& cfg, std::size_t dim, double lb,
                  double ub) {
    if (dim < 1) throw std::invalid_argument("gwo-bench: dimension must be >= 1");
    if (!(lb < ub)) throw std::invalid_argument("gwo-bench: lower bound must be below upper bound");
    gwo::SearchSpace space;
    space.lb.assign(dim, lb);
    space.ub.assign(dim, ub);
    const gwo::GwoResult result = gwo::run(gwo::sphere, space, cfg.gwo);

    std::ostringstream out;
    out << "iteration,best_fitness\n";
    for (std::size_t i = 0; i < result.history.size(); ++i)
        out << (i + 1) << ',' << kv::format_double(result.history[i]) << '\n';

    ensure_dir(out_dir);
    const std::string path = join(out_dir, "gwo_history.csv");
    write_file_atomic(path, out.str());
    note_written(path);
    std::cout << "best_fitness " << kv::format_double(result.best_fitness) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seasonal-ARIMA + LSTM hybrid forecaster with grey-wolf coefficient search"};
    app.require_subcommand(1);
    // subcommands inherit this: --config/--seed/--out may follow the
    // subcommand name
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed_flag, "master random seed (overrides config)");
    app.add_option("--out", out_dir, "output directory (created if absent)");

    std::optional<std::string> mode_flag;
    std::optional<std::size_t> m_flag, window_flag, k_flag, horizon_flag;
    std::optional<std::string> compare_flag, actual_flag, segment_flag;
    bool select_order = false;
    std::string input_path, model_dir = ".";
    std::optional<std::size_t> synth_n, synth_period;
    std::optional<double> synth_amplitude, synth_trend, synth_sigma, synth_coupling;
    std::size_t bench_dim = 10;
    double bench_lb = -100.0, bench_ub = 100.0;

    CLI::App* sub_preprocess = app.add_subcommand("preprocess", "outlier masking + imputation");
    sub_preprocess->add_option("input", input_path, "input CSV (timestamp,value)")->required();
    sub_preprocess->add_option("--m", m_flag, "seasonal period");

    CLI::App* sub_fit = app.add_subcommand("fit", "train a model and write its files");
    sub_fit->add_option("input", input_path, "cleaned CSV")->required();
    sub_fit->add_option("--mode", mode_flag, "hybrid|sarima_only|arima|lstm_only|rnn_cell");
    sub_fit->add_option("--m", m_flag, "seasonal period");
    sub_fit->add_option("--window", window_flag, "residual window length (default 2*m)");
    sub_fit->add_flag("--select-order", select_order, "grid-search SARIMA orders on validation RMSE");

    CLI::App* sub_forecast = app.add_subcommand("forecast", "forecast from saved model files");
    sub_forecast->add_option("--model", model_dir, "model directory (from fit)");
    sub_forecast->add_option("--horizon", horizon_flag, "steps ahead, >= 1")->required();
    sub_forecast->add_option("--actual", actual_flag, "CSV with actuals to place alongside");

    CLI::App* sub_evaluate = app.add_subcommand("evaluate", "train and score a held-out segment");
    sub_evaluate->add_option("input", input_path, "cleaned CSV")->required();
    sub_evaluate->add_option("--mode", mode_flag, "model variant");
    sub_evaluate->add_option("--m", m_flag, "seasonal period");
    sub_evaluate->add_option("--window", window_flag, "residual window length");
    sub_evaluate->add_option("--segment", segment_flag, "val|test (default test)");

    CLI::App* sub_cv = app.add_subcommand("cv", "rolling-origin cross-validation");
    sub_cv->add_option("input", input_path, "cleaned CSV")->required();
    sub_cv->add_option("--mode", mode_flag, "model variant");
    sub_cv->add_option("--m", m_flag, "seasonal period");
    sub_cv->add_option("--window", window_flag, "residual window length");
    sub_cv->add_option("--k", k_flag, "fold count (default 5)");
    sub_cv->add_option("--compare", compare_flag, "second mode; adds a paired t-test p-value");

    CLI::App* sub_synth = app.add_subcommand("synth", "generate a benchmark series");
    sub_synth->add_option("--n", synth_n, "series length");
    sub_synth->add_option("--period", synth_period, "seasonal period");
    sub_synth->add_option("--amplitude", synth_amplitude, "seasonal amplitude");
    sub_synth->add_option("--trend", synth_trend, "slope per step");
    sub_synth->add_option("--sigma", synth_sigma, "AR(1) innovation scale");
    sub_synth->add_option("--coupling", synth_coupling, "nonlinear component strength");

    CLI::App* sub_bench = app.add_subcommand("gwo-bench", "sphere-function convergence history");
    sub_bench->add_option("--dim", bench_dim, "dimensions (default 10)");
    sub_bench->add_option("--lower", bench_lb, "lower bound (default -100)");
    sub_bench->add_option("--upper", bench_ub, "upper bound (default 100)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (config_path) cfg.apply(kv::Document::load(*config_path));
        if (seed_flag) cfg.seed = *seed_flag;
        if (mode_flag) cfg.mode = hybrid::mode_from_name(*mode_flag);
        if (m_flag) cfg.m = *m_flag;
        if (window_flag) cfg.window_L = *window_flag;
        if (k_flag) cfg.cv_k = *k_flag;
        if (synth_n) cfg.synth.n = *synth_n;
        if (synth_period) cfg.synth.period = *synth_period;
        if (synth_amplitude) cfg.synth.amplitude = *synth_amplitude;
        if (synth_trend) cfg.synth.trend = *synth_trend;
        if (synth_sigma) cfg.synth.sigma = *synth_sigma;
        if (synth_coupling) cfg.synth.coupling = *synth_coupling;
        cfg.finalize();

        if (sub_preprocess->parsed()) return cmd_preprocess(input_path, out_dir, cfg);
        if (sub_fit->parsed()) return cmd_fit(input_path, out_dir, cfg, select_order);
        if (sub_forecast->parsed()) {
            if (!horizon_flag || *horizon_flag < 1)
                throw std::invalid_argument("forecast: horizon must be >= 1");
            return cmd_forecast(model_dir, out_dir, *horizon_flag, actual_flag);
        }
        if (sub_evaluate->parsed()) {
            hybrid::Segment segment = hybrid::Segment::test;
            if (segment_flag) {
                if (*segment_flag == "val") segment = hybrid::Segment::val;
                else if (*segment_flag == "test") segment = hybrid::Segment::test;
                else throw std::invalid_argument("evaluate: segment must be val or test");
            }
            return cmd_evaluate(input_path, out_dir, cfg, segment);
        }
        if (sub_cv->parsed()) return cmd_cv(input_path, out_dir, cfg, compare_flag);
        if (sub_synth->parsed()) return cmd_synth(out_dir, cfg);
        if (sub_bench->parsed()) return cmd_gwo_bench(out_dir, cfg, bench_dim, bench_lb, bench_ub);
        throw std::logic_error("no subcommand dispatched");
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
