#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wolfcast/random.hpp"

namespace wolfcast::lstm {

enum class CellKind {
    lstm,      // forget/input/output gates + candidate state
    rnn_tanh,  // plain h' = tanh(W [h, x] + b), kept as an ablation baseline
};

std::string cell_kind_name(CellKind kind);
CellKind cell_kind_from_name(const std::string& name);

/**
 * One recurrent layer. Weight matrices are row-major [hidden_size x
 * (hidden_size + input_size)] and act on the concatenation [h_prev, x].
 * The rnn_tanh cell only uses Wc/bc; the gate blocks stay empty.
 */
struct LayerWeights {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    std::vector<double> Wf, Wi, Wo, Wc;
    std::vector<double> bf, bi, bo, bc;
};

/**
 * Stacked recurrent layers, an optional ReLU dense layer (dense_size == 0
 * means absent) and a linear scalar head. The prediction is read from the
 * last timestep of the top layer.
 */
struct Network {
    CellKind cell = CellKind::lstm;
    std::size_t input_size = 1;
    std::size_t hidden_size = 0;
    std::size_t dense_size = 0;
    std::vector<LayerWeights> layers;
    std::vector<double> dense_w;  // [dense_size x hidden_size]
    std::vector<double> dense_b;  // [dense_size]
    std::vector<double> head_w;   // [dense_size ? dense_size : hidden_size]
    double head_b = 0.0;
};

struct TrainConfig {
    std::size_t max_epochs = 200;
    std::size_t batch_size = 64;
    std::size_t patience = 20;  // epochs without validation improvement
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

/**
 * Weights drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] where fan_in
 * is the row length of each matrix; biases start at zero. Draw order is
 * fixed (layers in order, gate blocks f, i, o, c row-major, then dense and
 * head weights) so a seed pins the network bit-for-bit.
 */
Network make_network(CellKind cell, std::size_t input_size, std::size_t hidden_size,
                     std::size_t num_layers, std::size_t dense_size, std::uint64_t seed);

// Same shapes, every parameter zero. Used for gradient accumulators.
Network zeros_like(const Network& net);

std::size_t parameter_count(const Network& net);

// Everything the backward pass needs from one cell application.
struct StepTape {
    std::vector<double> z;  // [h_prev, x]
    std::vector<double> f, i, o, g;  // gate activations; g is the candidate
    std::vector<double> c_prev, c, tanh_c;
    std::vector<double> h;
};

struct Tape {
    std::vector<std::vector<StepTape>> steps;  // [layer][time]
    std::vector<double> dense_pre, dense_out;
    double prediction = 0.0;
};

/**
 * Single cell application; h_prev/c_prev of size hidden_size, x of size
 * input_size (c_prev is ignored by rnn_tanh). With all-zero weights and
 * inputs the gates sit at 0.5 and the candidate at 0, so h' = c' = 0.
 */
void cell_forward(const LayerWeights& layer, CellKind kind, std::span<const double> x,
                  std::span<const double> h_prev, std::span<const double> c_prev, StepTape& out);

/**
 * Runs the full stack over a sequence (timestep-major, length must be a
 * multiple of input_size) from zero initial states and applies the head.
 * With an all-zero network the prediction is exactly head_b.
 */
double forward(const Network& net, std::span<const double> sequence, Tape* tape = nullptr);

// Mean squared error of the network over a sample set.
double loss(const Network& net, const std::vector<std::vector<double>>& inputs,
            const std::vector<double>& targets);

/**
 * Exact gradient of the mean squared error over the batch, accumulated into
 * `grads` (zeroed by the caller; shapes must match). Returns the batch loss.
 * For a single sample the head bias gradient is 2 * (prediction - target).
 */
double batch_gradients(const Network& net, std::span<const std::vector<double>* const> inputs,
                       std::span<const double> targets, Network& grads);
double batch_gradients(const Network& net, const std::vector<std::vector<double>>& inputs,
                       const std::vector<double>& targets, Network& grads);

struct TrainResult {
    std::vector<double> train_loss;  // one entry per epoch actually run
    std::vector<double> val_loss;    // tracks train_loss when no validation set
    std::size_t best_epoch = 0;      // 1-based epoch whose weights were kept
};

/**
 * Adam with shuffled mini-batches. Early-stops after `patience` epochs
 * without improvement of the monitored loss (validation when provided,
 * otherwise training) and restores the best weights seen. A non-finite
 * epoch loss raises an error naming the epoch. The same seed reproduces
 * the exact loss history.
 */
TrainResult train(Network& net, const std::vector<std::vector<double>>& train_inputs,
                  const std::vector<double>& train_targets,
                  const std::vector<std::vector<double>>& val_inputs,
                  const std::vector<double>& val_targets, const TrainConfig& config);

/**
 * Compares batch_gradients against central finite differences of the batch
 * loss, parameter by parameter. Returns the largest relative error
 * |analytic - numeric| / max(|analytic| + |numeric|, 1e-6).
 */
double gradient_check(const Network& net, const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& targets, double step = 1e-5);

// Plain-text serialization; read(write(net)) forwards bit-for-bit.
std::string write(const Network& net);
Network read(const std::string& text);

}  // namespace wolfcast::lstm
