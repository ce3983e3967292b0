#pragma once

#include <cstdint>
#include <string>

#include "wolfcast/gwo.hpp"
#include "wolfcast/hybrid.hpp"
#include "wolfcast/kv_file.hpp"
#include "wolfcast/lstm.hpp"
#include "wolfcast/sarima.hpp"
#include "wolfcast/synth.hpp"

namespace wolfcast {

/**
 * Everything a run needs, with documented defaults. Values come from three
 * layers, later ones winning: built-in defaults, a `--config` key-value
 * file, then command-line flags. Call finalize() after the overlays to
 * propagate the seed and seasonal period into the component configs.
 */
struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t m = 24;                         // seasonal period
    hybrid::Mode mode = hybrid::Mode::hybrid;
    sarima::SarimaOrder order{1, 0, 1, 1, 1, 1, 24};
    gwo::GwoConfig gwo;        // 30 wolves, 50 iterations, epsilon 1e-8
    lstm::TrainConfig train;   // lr 0.001, batch 64, 200 epochs, patience 20
    hybrid::NetworkSpec net;   // 3 layers x 128 hidden, 128 dense
    std::size_t window_L = 0;  // 0 = derive 2*m in finalize()
    std::size_t cv_k = 5;
    synth::SyntheticSpec synth;

    // Overlays recognized `section.key` entries; unknown keys are schema
    // errors so typos fail loudly.
    void apply(const kv::Document& doc);

    void finalize();
};

}  // namespace wolfcast
