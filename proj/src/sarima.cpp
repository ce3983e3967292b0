#include "wolfcast/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wolfcast/kv_file.hpp"

namespace wolfcast::sarima {

namespace {

constexpr double kCoeffBound = 0.99;

std::size_t checked_size(int v, const char* name) {
    if (v < 0) throw std::invalid_argument(std::string("sarima: ") + name + " must be non-negative");
    return static_cast<std::size_t>(v);
}

// Full error vector of the one-step recursion; entries before the burn-in
// are zero by definition. Returns false (poisoning nothing) when a
// non-finite value appears, so css_objective can map it to +infinity.
bool run_recursion(const SarimaParams& params, const std::vector<double>& w,
                   const SarimaOrder& order, std::vector<double>& eps, double& css) {
    const std::size_t n = w.size();
    const std::size_t burn = order.burn_in();
    const std::size_t p = static_cast<std::size_t>(order.p);
    const std::size_t q = static_cast<std::size_t>(order.q);
    const std::size_t sp = static_cast<std::size_t>(order.P);
    const std::size_t sq = static_cast<std::size_t>(order.Q);
    eps.assign(n, 0.0);
    css = 0.0;
    for (std::size_t t = burn; t < n; ++t) {
        double pred = params.c;
        for (std::size_t i = 0; i < p; ++i) pred += params.phi[i] * w[t - (i + 1)];
        for (std::size_t j = 0; j < sp; ++j) pred += params.sphi[j] * w[t - (j + 1) * order.m];
        for (std::size_t i = 0; i < q; ++i) pred += params.theta[i] * eps[t - (i + 1)];
        for (std::size_t j = 0; j < sq; ++j) pred += params.stheta[j] * eps[t - (j + 1) * order.m];
        const double e = w[t] - pred;
        if (!std::isfinite(e)) return false;
        eps[t] = e;
        css += e * e;
    }
    return std::isfinite(css);
}

double rmse_of(const std::vector<double>& actual, const std::vector<double>& predicted) {
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

}  // namespace

std::size_t SarimaOrder::burn_in() const {
    const std::size_t pm = static_cast<std::size_t>(P) * m;
    const std::size_t qm = static_cast<std::size_t>(Q) * m;
    return std::max({static_cast<std::size_t>(p), static_cast<std::size_t>(q), pm, qm});
}

std::size_t SarimaOrder::diff_consumed() const {
    return static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * m;
}

void SarimaOrder::validate(std::size_t train_length) const {
    checked_size(p, "p");
    checked_size(d, "d");
    checked_size(q, "q");
    checked_size(P, "P");
    checked_size(D, "D");
    checked_size(Q, "Q");
    if (m < 1) throw std::invalid_argument("sarima: seasonal period m must be >= 1");
    if ((P > 0 || D > 0 || Q > 0) && m < 2)
        throw std::invalid_argument("sarima: seasonal orders require m >= 2");
    if (diff_consumed() + burn_in() >= train_length)
        throw std::invalid_argument(
            "sarima: series of length " + std::to_string(train_length) +
            " is too short for the requested order (needs more than " +
            std::to_string(diff_consumed() + burn_in()) + " points)");
}

SarimaParams SarimaParams::from_vector(std::span<const double> v, const SarimaOrder& order) {
    if (v.size() != order.coeff_count())
        throw std::invalid_argument("sarima: parameter vector has " + std::to_string(v.size()) +
                                    " entries, expected " + std::to_string(order.coeff_count()));
    SarimaParams out;
    std::size_t at = 0;
    out.c = v[at++];
    out.phi.assign(v.begin() + at, v.begin() + at + order.p);
    at += static_cast<std::size_t>(order.p);
    out.theta.assign(v.begin() + at, v.begin() + at + order.q);
    at += static_cast<std::size_t>(order.q);
    out.sphi.assign(v.begin() + at, v.begin() + at + order.P);
    at += static_cast<std::size_t>(order.P);
    out.stheta.assign(v.begin() + at, v.begin() + at + order.Q);
    return out;
}

std::vector<double> SarimaParams::to_vector() const {
    std::vector<double> v;
    v.reserve(1 + phi.size() + theta.size() + sphi.size() + stheta.size());
    v.push_back(c);
    v.insert(v.end(), phi.begin(), phi.end());
    v.insert(v.end(), theta.begin(), theta.end());
    v.insert(v.end(), sphi.begin(), sphi.end());
    v.insert(v.end(), stheta.begin(), stheta.end());
    return v;
}

std::vector<double> difference(const std::vector<double>& values, int d, int D, std::size_t m,
                               std::vector<double>* initials) {
    checked_size(d, "d");
    checked_size(D, "D");
    if (m < 1) throw std::invalid_argument("sarima: seasonal period m must be >= 1");
    if (initials) initials->clear();
    std::vector<double> cur = values;
    const auto one_stage = [&](std::size_t lag) {
        if (cur.size() <= lag)
            throw std::invalid_argument("sarima: series too short to difference at lag " +
                                        std::to_string(lag));
        if (initials) initials->insert(initials->end(), cur.begin(), cur.begin() + lag);
        std::vector<double> next(cur.size() - lag);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = cur[i + lag] - cur[i];
        cur = std::move(next);
    };
    for (int j = 0; j < D; ++j) one_stage(m);
    for (int i = 0; i < d; ++i) one_stage(1);
    return cur;
}

std::vector<double> integrate(const std::vector<double>& diffed, const std::vector<double>& initials,
                              int d, int D, std::size_t m) {
    checked_size(d, "d");
    checked_size(D, "D");
    if (m < 1) throw std::invalid_argument("sarima: seasonal period m must be >= 1");
    const std::size_t need = static_cast<std::size_t>(d) + static_cast<std::size_t>(D) * m;
    if (initials.size() != need)
        throw std::invalid_argument("sarima: expected " + std::to_string(need) +
                                    " initial values, got " + std::to_string(initials.size()));
    // Stage lags in application order; heads sit at matching offsets.
    std::vector<std::size_t> lags;
    for (int j = 0; j < D; ++j) lags.push_back(m);
    for (int i = 0; i < d; ++i) lags.push_back(1);
    std::vector<std::size_t> offsets(lags.size(), 0);
    for (std::size_t k = 1; k < lags.size(); ++k) offsets[k] = offsets[k - 1] + lags[k - 1];

    std::vector<double> cur = diffed;
    for (std::size_t k = lags.size(); k-- > 0;) {
        const std::size_t lag = lags[k];
        std::vector<double> next(cur.size() + lag);
        std::copy(initials.begin() + offsets[k], initials.begin() + offsets[k] + lag, next.begin());
        for (std::size_t i = lag; i < next.size(); ++i) next[i] = cur[i - lag] + next[i - lag];
        cur = std::move(next);
    }
    return cur;
}

double css_objective(const SarimaParams& params, const std::vector<double>& diffed,
                     const SarimaOrder& order) {
    if (diffed.size() <= order.burn_in())
        throw std::invalid_argument("sarima: differenced series no longer than the burn-in");
    std::vector<double> eps;
    double css = 0.0;
    if (!run_recursion(params, diffed, order, eps, css))
        return std::numeric_limits<double>::infinity();
    return css;
}

std::vector<double> arma_residuals(const SarimaParams& params, const std::vector<double>& diffed,
                                   const SarimaOrder& order) {
    if (diffed.size() <= order.burn_in())
        throw std::invalid_argument("sarima: differenced series no longer than the burn-in");
    std::vector<double> eps;
    double css = 0.0;
    if (!run_recursion(params, diffed, order, eps, css))
        throw std::runtime_error("sarima: residual recursion produced non-finite values");
    return std::vector<double>(eps.begin() + static_cast<std::ptrdiff_t>(order.burn_in()), eps.end());
}

SarimaFit fit(const std::vector<double>& series, const SarimaOrder& order,
              const gwo::GwoConfig& gwo_config) {
    order.validate(series.size());
    gwo_config.validate();

    std::vector<double> initials;
    const std::vector<double> w = difference(series, order.d, order.D, order.m, &initials);

    // Search box: coefficients in [-0.99, 0.99]; the constant either pinned
    // to zero (differenced model) or allowed a generous data-scaled range.
    const std::size_t dim = order.coeff_count();
    gwo::SearchSpace space;
    space.lb.assign(dim, -kCoeffBound);
    space.ub.assign(dim, kCoeffBound);
    if (order.has_constant()) {
        double mu = 0.0;
        for (double v : w) mu += v;
        mu /= static_cast<double>(w.size());
        double var = 0.0;
        for (double v : w) var += (v - mu) * (v - mu);
        const double sd = std::sqrt(var / static_cast<double>(w.size()));
        const double half_range = 2.0 * std::abs(mu) + 10.0 * sd;
        space.lb[0] = mu - half_range;
        space.ub[0] = mu + half_range;
    } else {
        space.lb[0] = 0.0;
        space.ub[0] = 0.0;
    }

    const auto objective = [&](std::span<const double> v) {
        return css_objective(SarimaParams::from_vector(v, order), w, order);
    };
    const gwo::GwoResult best = gwo::run(objective, space, gwo_config);

    SarimaFit out;
    out.order = order;
    out.params = SarimaParams::from_vector(best.best_position, order);
    out.train_length = series.size();

    std::vector<double> eps;
    if (!run_recursion(out.params, w, order, eps, out.css))
        throw std::runtime_error("sarima: fitted parameters produce non-finite residuals");
    const std::size_t burn = order.burn_in();
    out.residuals.assign(eps.begin() + static_cast<std::ptrdiff_t>(burn), eps.end());
    out.sigma2 = out.css / static_cast<double>(w.size() - burn);

    const std::size_t w_depth =
        std::max(static_cast<std::size_t>(order.p), static_cast<std::size_t>(order.P) * order.m);
    const std::size_t e_depth =
        std::max(static_cast<std::size_t>(order.q), static_cast<std::size_t>(order.Q) * order.m);
    out.tail.diffed_tail.assign(w.end() - static_cast<std::ptrdiff_t>(std::min(w_depth, w.size())),
                                w.end());
    out.tail.resid_tail.assign(eps.end() - static_cast<std::ptrdiff_t>(std::min(e_depth, eps.size())),
                               eps.end());

    // Per-stage tails for forecast integration: each differencing stage k
    // keeps the last `lag` values of its input series.
    std::vector<double> cur = series;
    const auto keep_tail = [&](std::size_t lag) {
        out.tail.stage_tails.emplace_back(cur.end() - static_cast<std::ptrdiff_t>(lag), cur.end());
        std::vector<double> next(cur.size() - lag);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = cur[i + lag] - cur[i];
        cur = std::move(next);
    };
    for (int j = 0; j < order.D; ++j) keep_tail(order.m);
    for (int i = 0; i < order.d; ++i) keep_tail(1);
    return out;
}

std::vector<double> forecast(const SarimaFit& fit, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("sarima: forecast horizon must be >= 1");
    const SarimaOrder& order = fit.order;
    const std::size_t p = static_cast<std::size_t>(order.p);
    const std::size_t q = static_cast<std::size_t>(order.q);
    const std::size_t sp = static_cast<std::size_t>(order.P);
    const std::size_t sq = static_cast<std::size_t>(order.Q);

    // Differenced-scale recursion over [tail | future]; future errors are 0,
    // so MA terms only reach back into the stored tail.
    std::vector<double> w = fit.tail.diffed_tail;
    const std::size_t w_base = w.size();
    const std::vector<double>& e_tail = fit.tail.resid_tail;
    w.reserve(w_base + horizon);
    for (std::size_t s = 0; s < horizon; ++s) {
        const std::size_t t = w_base + s;  // index into the extended w
        double pred = fit.params.c;
        for (std::size_t i = 0; i < p; ++i) pred += fit.params.phi[i] * w[t - (i + 1)];
        for (std::size_t j = 0; j < sp; ++j) pred += fit.params.sphi[j] * w[t - (j + 1) * order.m];
        for (std::size_t i = 0; i < q; ++i) {
            const std::size_t back = i + 1;
            if (back > s) {  // reaches into observed errors
                const std::size_t from_end = back - s;
                if (from_end <= e_tail.size()) pred += fit.params.theta[i] * e_tail[e_tail.size() - from_end];
            }
        }
        for (std::size_t j = 0; j < sq; ++j) {
            const std::size_t back = (j + 1) * order.m;
            if (back > s) {
                const std::size_t from_end = back - s;
                if (from_end <= e_tail.size()) pred += fit.params.stheta[j] * e_tail[e_tail.size() - from_end];
            }
        }
        w.push_back(pred);
    }
    std::vector<double> ext(w.begin() + static_cast<std::ptrdiff_t>(w_base), w.end());

    // Integrate stage by stage, innermost first, continuing each stage's
    // series from its stored tail.
    std::vector<std::size_t> lags;
    for (int j = 0; j < order.D; ++j) lags.push_back(order.m);
    for (int i = 0; i < order.d; ++i) lags.push_back(1);
    for (std::size_t k = lags.size(); k-- > 0;) {
        const std::size_t lag = lags[k];
        const std::vector<double>& tail = fit.tail.stage_tails[k];
        std::vector<double> undone(ext.size());
        for (std::size_t t = 0; t < ext.size(); ++t)
            undone[t] = ext[t] + (t < lag ? tail[tail.size() - lag + t] : undone[t - lag]);
        ext = std::move(undone);
    }
    return ext;
}

std::vector<double> residuals(const SarimaFit& fit, const std::vector<double>& series) {
    if (series.size() < fit.train_length)
        throw std::invalid_argument("sarima: series shorter than the fit's training series");
    const std::vector<double> w = difference(series, fit.order.d, fit.order.D, fit.order.m);
    return arma_residuals(fit.params, w, fit.order);
}

std::string write(const SarimaFit& fit) {
    kv::Document doc;
    doc.set("format", "sarima/1");
    doc.set("p", static_cast<std::int64_t>(fit.order.p));
    doc.set("d", static_cast<std::int64_t>(fit.order.d));
    doc.set("q", static_cast<std::int64_t>(fit.order.q));
    doc.set("P", static_cast<std::int64_t>(fit.order.P));
    doc.set("D", static_cast<std::int64_t>(fit.order.D));
    doc.set("Q", static_cast<std::int64_t>(fit.order.Q));
    doc.set("m", static_cast<std::int64_t>(fit.order.m));
    doc.set("train_length", static_cast<std::int64_t>(fit.train_length));
    doc.set("c", fit.params.c);
    doc.set_doubles("phi", fit.params.phi);
    doc.set_doubles("theta", fit.params.theta);
    doc.set_doubles("seasonal_phi", fit.params.sphi);
    doc.set_doubles("seasonal_theta", fit.params.stheta);
    doc.set("sigma2", fit.sigma2);
    doc.set("css", fit.css);
    doc.set_doubles("residuals", fit.residuals);
    doc.set_doubles("diffed_tail", fit.tail.diffed_tail);
    doc.set_doubles("resid_tail", fit.tail.resid_tail);
    doc.set("stage_tail_count", static_cast<std::int64_t>(fit.tail.stage_tails.size()));
    for (std::size_t k = 0; k < fit.tail.stage_tails.size(); ++k)
        doc.set_doubles("stage_tail_" + std::to_string(k), fit.tail.stage_tails[k]);
    return doc.str();
}

SarimaFit read(const std::string& text) {
    const kv::Document doc = kv::Document::parse(text);
    if (doc.get("format") != "sarima/1")
        throw SchemaError("sarima: unsupported model format '" + doc.get("format") + "'");
    SarimaFit fit;
    fit.order.p = static_cast<int>(doc.get_int("p"));
    fit.order.d = static_cast<int>(doc.get_int("d"));
    fit.order.q = static_cast<int>(doc.get_int("q"));
    fit.order.P = static_cast<int>(doc.get_int("P"));
    fit.order.D = static_cast<int>(doc.get_int("D"));
    fit.order.Q = static_cast<int>(doc.get_int("Q"));
    fit.order.m = static_cast<std::size_t>(doc.get_int("m"));
    fit.train_length = static_cast<std::size_t>(doc.get_int("train_length"));
    fit.order.validate(fit.train_length);
    fit.params.c = doc.get_double("c");
    fit.params.phi = doc.get_doubles("phi");
    fit.params.theta = doc.get_doubles("theta");
    fit.params.sphi = doc.get_doubles("seasonal_phi");
    fit.params.stheta = doc.get_doubles("seasonal_theta");
    if (fit.params.phi.size() != static_cast<std::size_t>(fit.order.p) ||
        fit.params.theta.size() != static_cast<std::size_t>(fit.order.q) ||
        fit.params.sphi.size() != static_cast<std::size_t>(fit.order.P) ||
        fit.params.stheta.size() != static_cast<std::size_t>(fit.order.Q))
        throw SchemaError("sarima: coefficient counts do not match the stored order");
    fit.sigma2 = doc.get_double("sigma2");
    fit.css = doc.get_double("css");
    fit.residuals = doc.get_doubles("residuals");
    fit.tail.diffed_tail = doc.get_doubles("diffed_tail");
    fit.tail.resid_tail = doc.get_doubles("resid_tail");
    const std::size_t stages = static_cast<std::size_t>(doc.get_int("stage_tail_count"));
    const std::size_t expected_stages =
        static_cast<std::size_t>(fit.order.d) + static_cast<std::size_t>(fit.order.D);
    if (stages != expected_stages)
        throw SchemaError("sarima: stage tail count does not match the stored order");
    for (std::size_t k = 0; k < stages; ++k)
        fit.tail.stage_tails.push_back(doc.get_doubles("stage_tail_" + std::to_string(k)));
    return fit;
}

SarimaOrder select_order(const std::vector<double>& train, const std::vector<double>& val,
                         const SarimaOrder& base, const gwo::GwoConfig& gwo_config,
                         int max_order) {
    if (val.empty()) throw std::invalid_argument("sarima: order selection needs validation data");
    if (max_order < 0) throw std::invalid_argument("sarima: max_order must be non-negative");
    bool found = false;
    SarimaOrder best_order = base;
    double best_rmse = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_order; ++p)
        for (int q = 0; q <= max_order; ++q)
            for (int P = 0; P <= max_order; ++P)
                for (int Q = 0; Q <= max_order; ++Q) {
                    SarimaOrder cand = base;
                    cand.p = p;
                    cand.q = q;
                    cand.P = P;
                    cand.Q = Q;
                    try {
                        cand.validate(train.size());
                    } catch (const std::invalid_argument&) {
                        continue;  // too short for this candidate
                    }
                    const SarimaFit f = fit(train, cand, gwo_config);
                    const std::vector<double> pred = forecast(f, val.size());
                    const double r = rmse_of(val, pred);
                    if (std::isfinite(r) && r < best_rmse) {
                        best_rmse = r;
                        best_order = cand;
                        found = true;
                    }
                }
    if (!found) throw std::runtime_error("sarima: no candidate order could be fitted");
    return best_order;
}

}  // namespace wolfcast::sarima
