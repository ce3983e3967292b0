#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wolfcast/gwo.hpp"

namespace wolfcast::sarima {

struct SarimaOrder {
    int p = 0, d = 0, q = 0;  // non-seasonal AR / differencing / MA
    int P = 0, D = 0, Q = 0;  // seasonal counterparts at lag m
    std::size_t m = 1;

    std::size_t burn_in() const;        // max(p, q, P*m, Q*m)
    std::size_t diff_consumed() const;  // d + D*m
    std::size_t coeff_count() const { return static_cast<std::size_t>(1 + p + q + P + Q); }
    bool has_constant() const { return d == 0 && D == 0; }

    // Enforces non-negative orders, m >= 2 when any seasonal order is set,
    // and d + D*m + burn_in < train_length.
    void validate(std::size_t train_length) const;
};

struct SarimaParams {
    double c = 0.0;
    std::vector<double> phi;    // p non-seasonal AR coefficients
    std::vector<double> theta;  // q non-seasonal MA coefficients
    std::vector<double> sphi;   // P seasonal AR coefficients
    std::vector<double> stheta; // Q seasonal MA coefficients

    // Flat layout [c, phi.., theta.., sphi.., stheta..] used by the optimizer.
    static SarimaParams from_vector(std::span<const double> v, const SarimaOrder& order);
    std::vector<double> to_vector() const;
};

/**
 * Applies seasonal differencing (lag m) D times, then regular differencing
 * d times. Output length = input length - d - D*m. When `initials` is given
 * it receives the head values each stage consumed, in consumption order:
 * D blocks of m values, then d single values.
 */
std::vector<double> difference(const std::vector<double>& values, int d, int D, std::size_t m,
                               std::vector<double>* initials = nullptr);

// Exact inverse: integrate(difference(x, d, D, m, &init), init, d, D, m) == x.
std::vector<double> integrate(const std::vector<double>& diffed, const std::vector<double>& initials,
                              int d, int D, std::size_t m);

/**
 * Conditional sum of squares of the one-step ARMA recursion
 *   w_t = c + sum phi_i w_{t-i} + sum Phi_j w_{t-jm}
 *           + sum theta_i e_{t-i} + sum Theta_j e_{t-jm} + e_t
 * with pre-sample errors set to zero; the first burn_in errors are excluded
 * from the sum. Non-finite intermediates yield +infinity.
 */
double css_objective(const SarimaParams& params, const std::vector<double>& diffed,
                     const SarimaOrder& order);

// Recursion errors e_t for t >= burn_in (length diffed.size() - burn_in).
std::vector<double> arma_residuals(const SarimaParams& params, const std::vector<double>& diffed,
                                   const SarimaOrder& order);

// What multi-step forecasting needs once the training series is gone.
struct TailState {
    std::vector<double> diffed_tail;              // last max(p, P*m) differenced values
    std::vector<double> resid_tail;               // last max(q, Q*m) recursion errors
    std::vector<std::vector<double>> stage_tails; // per differencing stage, for integration
};

struct SarimaFit {
    SarimaOrder order;
    SarimaParams params;
    std::vector<double> residuals;  // one-step errors past the burn-in
    double sigma2 = 0.0;
    double css = 0.0;
    TailState tail;
    std::size_t train_length = 0;
};

/**
 * Estimates coefficients by minimizing css_objective with the grey wolf
 * optimizer. Coefficients are searched in [-0.99, 0.99]; the constant in
 * data-scaled bounds when d = D = 0 and pinned to zero otherwise (a
 * differenced model with a free constant would forecast a drift).
 */
SarimaFit fit(const std::vector<double>& series, const SarimaOrder& order,
              const gwo::GwoConfig& gwo_config);

/**
 * Recursive multi-step forecast: future errors are zero on the differenced
 * scale, then the result is integrated back to the original scale.
 */
std::vector<double> forecast(const SarimaFit& fit, std::size_t horizon);

/**
 * One-step in-sample errors of `fit` on `series` (which must extend the
 * training series; pass train+validation data to obtain validation-range
 * errors). Aligned past the differencing offset plus burn-in.
 */
std::vector<double> residuals(const SarimaFit& fit, const std::vector<double>& series);

// Plain-text serialization; read(write(fit)) reproduces forecasts bit-for-bit.
std::string write(const SarimaFit& fit);
SarimaFit read(const std::string& text);

/**
 * Grid search over p, q, P, Q in [0, max_order], keeping d, D, m from
 * `base`; picks the candidate whose forecasts over the validation block
 * have the lowest RMSE. Candidates invalid for the training length are
 * skipped; ties keep the earlier candidate in (p, q, P, Q) lexicographic
 * order.
 */
SarimaOrder select_order(const std::vector<double>& train, const std::vector<double>& val,
                         const SarimaOrder& base, const gwo::GwoConfig& gwo_config,
                         int max_order = 2);

}  // namespace wolfcast::sarima
