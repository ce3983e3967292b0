#include "wolfcast/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wolfcast/kv_file.hpp"
#include "wolfcast/random.hpp"
#include "wolfcast/time_series.hpp"

namespace wolfcast::synth {

void SyntheticSpec::validate() const {
    if (period < 2) throw std::invalid_argument("synth: period must be >= 2");
    if (n <= 3 * period)
        throw std::invalid_argument("synth: n must exceed 3 * period (got n = " +
                                    std::to_string(n) + ", period = " + std::to_string(period) + ")");
    if (!(sigma >= 0.0)) throw std::invalid_argument("synth: sigma must be >= 0");
}

SyntheticSeries generate(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticSeries out;
    out.series.resize(spec.n);
    out.trend.resize(spec.n);
    out.seasonal.resize(spec.n);
    out.noise.resize(spec.n);
    out.nonlinear.resize(spec.n);

    RandomSource rng(derive_seed(spec.seed, 2));
    const double omega_seasonal = 2.0 * std::numbers::pi / static_cast<double>(spec.period);

    // Limit-cycle oscillator: rotate by 2*pi/17 and relax the radius toward
    // 1; period 17 shares no factor with common seasonal lengths, so
    // seasonal differencing leaves it intact.
    const double omega = 2.0 * std::numbers::pi / 17.0;
    const double cw = std::cos(omega), sw = std::sin(omega);
    const double gamma = 0.2;
    double u = 1.0, v = 0.0;

    double e = 0.0;
    for (std::size_t t = 0; t < spec.n; ++t) {
        out.trend[t] = spec.trend * static_cast<double>(t);
        out.seasonal[t] = spec.amplitude * std::sin(omega_seasonal * static_cast<double>(t));
        e = 0.5 * e + spec.sigma * rng.normal();
        out.noise[t] = e;
        // quadratic readout keeps this outside any linear-in-lags model
        out.nonlinear[t] = spec.coupling * u * (1.0 + 0.5 * u * v);
        out.series[t] = out.trend[t] + out.seasonal[t] + out.noise[t] + out.nonlinear[t];

        const double r2 = u * u + v * v;
        const double relax = 1.0 + gamma * (1.0 - r2);
        const double nu = relax * (u * cw - v * sw);
        const double nv = relax * (u * sw + v * cw);
        u = nu;
        v = nv;
    }
    return out;
}

std::string render_components(const SyntheticSeries& data, std::int64_t start, std::int64_t step) {
    std::ostringstream out;
    out << "timestamp,series,trend,seasonal,noise,nonlinear\n";
    for (std::size_t t = 0; t < data.series.size(); ++t) {
        out << format_timestamp(start + static_cast<std::int64_t>(t) * step) << ','
            << kv::format_double(data.series[t]) << ',' << kv::format_double(data.trend[t]) << ','
            << kv::format_double(data.seasonal[t]) << ',' << kv::format_double(data.noise[t])
            << ',' << kv::format_double(data.nonlinear[t]) << '\n';
    }
    return out.str();
}

}  // namespace wolfcast::synth
