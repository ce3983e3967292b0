#include "wolfcast/run_config.hpp"

#include <stdexcept>

namespace wolfcast {

namespace {

std::size_t to_size(const std::string& value, const std::string& key) {
    const std::int64_t v = kv::parse_int(value, "config key " + key);
    if (v < 0) throw SchemaError("config key " + key + " must be non-negative, got " + value);
    return static_cast<std::size_t>(v);
}

int to_order(const std::string& value, const std::string& key) {
    const std::int64_t v = kv::parse_int(value, "config key " + key);
    if (v < 0 || v > 12)
        throw SchemaError("config key " + key + " must lie in [0, 12], got " + value);
    return static_cast<int>(v);
}

double to_real(const std::string& value, const std::string& key) {
    return kv::parse_double(value, "config key " + key);
}

}  // namespace

void RunConfig::apply(const kv::Document& doc) {
    for (const auto& [key, value] : doc.entries()) {
        if (key == "seed") {
            seed = static_cast<std::uint64_t>(kv::parse_int(value, "config key seed"));
        } else if (key == "m") {
            m = to_size(value, key);
        } else if (key == "mode") {
            mode = hybrid::mode_from_name(value);
        } else if (key == "window_L") {
            window_L = to_size(value, key);
        } else if (key == "cv.k") {
            cv_k = to_size(value, key);
        } else if (key == "sarima.p") {
            order.p = to_order(value, key);
        } else if (key == "sarima.d") {
            order.d = to_order(value, key);
        } else if (key == "sarima.q") {
            order.q = to_order(value, key);
        } else if (key == "sarima.P") {
            order.P = to_order(value, key);
        } else if (key == "sarima.D") {
            order.D = to_order(value, key);
        } else if (key == "sarima.Q") {
            order.Q = to_order(value, key);
        } else if (key == "gwo.pack_size") {
            gwo.pack_size = to_size(value, key);
        } else if (key == "gwo.max_iter") {
            gwo.max_iter = to_size(value, key);
        } else if (key == "gwo.epsilon") {
            gwo.epsilon = to_real(value, key);
        } else if (key == "train.learning_rate") {
            train.learning_rate = to_real(value, key);
        } else if (key == "train.batch_size") {
            train.batch_size = to_size(value, key);
        } else if (key == "train.max_epochs") {
            train.max_epochs = to_size(value, key);
        } else if (key == "train.patience") {
            train.patience = to_size(value, key);
        } else if (key == "net.hidden_size") {
            net.hidden_size = to_size(value, key);
        } else if (key == "net.num_layers") {
            net.num_layers = to_size(value, key);
        } else if (key == "net.dense_size") {
            net.dense_size = to_size(value, key);
        } else if (key == "synth.n") {
            synth.n = to_size(value, key);
        } else if (key == "synth.amplitude") {
            synth.amplitude = to_real(value, key);
        } else if (key == "synth.period") {
            synth.period = to_size(value, key);
        } else if (key == "synth.trend") {
            synth.trend = to_real(value, key);
        } else if (key == "synth.sigma") {
            synth.sigma = to_real(value, key);
        } else if (key == "synth.coupling") {
            synth.coupling = to_real(value, key);
        } else {
            throw SchemaError("unknown config key '" + key + "'");
        }
    }
}

void RunConfig::finalize() {
    if (m < 1) throw SchemaError("config: m must be >= 1");
    order.m = m;
    gwo.seed = seed;
    train.seed = seed;
    synth.seed = seed;
    if (window_L == 0) window_L = 2 * m;
    gwo.validate();
    train.validate();
    net.validate();
}

}  // namespace wolfcast
