#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wolfcast::synth {

/**
 * Desk-scale benchmark series: linear trend + seasonal sine + AR(1) noise
 * + a deterministic nonlinear oscillation whose period is incommensurate
 * with the seasonal one, so a purely seasonal-linear model cannot absorb it.
 */
struct SyntheticSpec {
    std::size_t n = 1000;
    double amplitude = 10.0;   // seasonal sine amplitude
    std::size_t period = 24;   // seasonal period
    double trend = 0.01;       // slope per step
    double sigma = 0.05;       // AR(1) innovation scale, >= 0
    double coupling = 1.0;     // nonlinear component strength
    std::uint64_t seed = 0;

    void validate() const;  // n > 3*period, period >= 2, sigma >= 0
};

struct SyntheticSeries {
    std::vector<double> series;  // sum of the four components below
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> noise;
    std::vector<double> nonlinear;
};

/**
 * series[t] = trend*t + amplitude*sin(2*pi*t/period) + e[t] + g[t], where
 * e is AR(1) noise (e[t] = 0.5 e[t-1] + sigma*xi) and g follows a smooth
 * limit-cycle oscillator of period ~17 read out through a quadratic term.
 * With sigma = 0 and coupling = 0 the series is exactly trend + seasonal.
 */
SyntheticSeries generate(const SyntheticSpec& spec);

// Components CSV (timestamp,series,trend,seasonal,noise,nonlinear).
std::string render_components(const SyntheticSeries& data, std::int64_t start, std::int64_t step);

}  // namespace wolfcast::synth
