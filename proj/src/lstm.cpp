#include "wolfcast/lstm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wolfcast/kv_file.hpp"

namespace wolfcast::lstm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = W z + b for a row-major [rows x cols] matrix.
void affine(const std::vector<double>& W, const std::vector<double>& b,
            const std::vector<double>& z, std::vector<double>& y) {
    const std::size_t rows = b.size();
    const std::size_t cols = z.size();
    y.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* row = W.data() + r * cols;
        for (std::size_t s = 0; s < cols; ++s) acc += row[s] * z[s];
        y[r] = acc;
    }
}

// Rank-one gradient accumulation: gW += da z^T, gb += da, dz += W^T da.
void affine_backward(const std::vector<double>& W, const std::vector<double>& z,
                     const std::vector<double>& da, std::vector<double>& gW,
                     std::vector<double>& gb, std::vector<double>& dz) {
    const std::size_t rows = da.size();
    const std::size_t cols = z.size();
    for (std::size_t r = 0; r < rows; ++r) {
        const double d = da[r];
        if (d == 0.0) continue;
        double* grow = gW.data() + r * cols;
        const double* row = W.data() + r * cols;
        for (std::size_t s = 0; s < cols; ++s) {
            grow[s] += d * z[s];
            dz[s] += row[s] * d;
        }
        gb[r] += d;
    }
}

// Pointers to every parameter in the fixed order shared by initialization,
// the optimizer state and the serialized form.
std::vector<double*> param_ptrs(Network& net) {
    std::vector<double*> out;
    const auto push_all = [&out](std::vector<double>& v) {
        for (double& x : v) out.push_back(&x);
    };
    for (LayerWeights& layer : net.layers) {
        if (net.cell == CellKind::lstm) {
            push_all(layer.Wf);
            push_all(layer.bf);
            push_all(layer.Wi);
            push_all(layer.bi);
            push_all(layer.Wo);
            push_all(layer.bo);
        }
        push_all(layer.Wc);
        push_all(layer.bc);
    }
    push_all(net.dense_w);
    push_all(net.dense_b);
    push_all(net.head_w);
    out.push_back(&net.head_b);
    return out;
}

void check_shapes(const Network& net) {
    if (net.layers.empty()) throw std::invalid_argument("lstm: network has no layers");
    if (net.input_size < 1 || net.hidden_size < 1)
        throw std::invalid_argument("lstm: input and hidden sizes must be >= 1");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerWeights& layer = net.layers[l];
        const std::size_t expect_in = l == 0 ? net.input_size : net.hidden_size;
        if (layer.input_size != expect_in || layer.hidden_size != net.hidden_size)
            throw std::invalid_argument("lstm: layer " + std::to_string(l) +
                                        " has inconsistent dimensions");
    }
}

}  // namespace

std::string cell_kind_name(CellKind kind) {
    return kind == CellKind::lstm ? "lstm" : "rnn_tanh";
}

CellKind cell_kind_from_name(const std::string& name) {
    if (name == "lstm") return CellKind::lstm;
    if (name == "rnn_tanh") return CellKind::rnn_tanh;
    throw SchemaError("lstm: unknown cell kind '" + name + "'");
}

void TrainConfig::validate() const {
    if (max_epochs < 1) throw std::invalid_argument("lstm: max_epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("lstm: batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("lstm: learning_rate must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("lstm: Adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw std::invalid_argument("lstm: adam_epsilon must be > 0");
}

Network make_network(CellKind cell, std::size_t input_size, std::size_t hidden_size,
                     std::size_t num_layers, std::size_t dense_size, std::uint64_t seed) {
    if (num_layers < 1) throw std::invalid_argument("lstm: need at least one layer");
    if (input_size < 1 || hidden_size < 1)
        throw std::invalid_argument("lstm: input and hidden sizes must be >= 1");
    Network net;
    net.cell = cell;
    net.input_size = input_size;
    net.hidden_size = hidden_size;
    net.dense_size = dense_size;

    RandomSource rng(seed);
    const auto init_matrix = [&rng](std::vector<double>& W, std::size_t rows, std::size_t cols) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        W.resize(rows * cols);
        for (double& w : W) w = rng.uniform(-bound, bound);
    };

    for (std::size_t l = 0; l < num_layers; ++l) {
        LayerWeights layer;
        layer.input_size = l == 0 ? input_size : hidden_size;
        layer.hidden_size = hidden_size;
        const std::size_t cols = layer.hidden_size + layer.input_size;
        if (cell == CellKind::lstm) {
            init_matrix(layer.Wf, hidden_size, cols);
            layer.bf.assign(hidden_size, 0.0);
            init_matrix(layer.Wi, hidden_size, cols);
            layer.bi.assign(hidden_size, 0.0);
            init_matrix(layer.Wo, hidden_size, cols);
            layer.bo.assign(hidden_size, 0.0);
        }
        init_matrix(layer.Wc, hidden_size, cols);
        layer.bc.assign(hidden_size, 0.0);
        net.layers.push_back(std::move(layer));
    }
    if (dense_size > 0) {
        init_matrix(net.dense_w, dense_size, hidden_size);
        net.dense_b.assign(dense_size, 0.0);
    }
    init_matrix(net.head_w, 1, dense_size > 0 ? dense_size : hidden_size);
    net.head_b = 0.0;
    return net;
}

Network zeros_like(const Network& net) {
    Network z = net;
    std::vector<double*> ptrs = param_ptrs(z);
    for (double* p : ptrs) *p = 0.0;
    return z;
}

std::size_t parameter_count(const Network& net) {
    std::size_t count = 0;
    for (const LayerWeights& layer : net.layers) {
        const std::size_t per_gate = layer.hidden_size * (layer.hidden_size + layer.input_size) +
                                     layer.hidden_size;
        count += per_gate * (net.cell == CellKind::lstm ? 4 : 1);
    }
    count += net.dense_w.size() + net.dense_b.size();
    count += net.head_w.size() + 1;
    return count;
}

void cell_forward(const LayerWeights& layer, CellKind kind, std::span<const double> x,
                  std::span<const double> h_prev, std::span<const double> c_prev, StepTape& out) {
    const std::size_t H = layer.hidden_size;
    if (x.size() != layer.input_size || h_prev.size() != H)
        throw std::invalid_argument("lstm: cell input dimensions do not match the layer");

    out.z.resize(H + x.size());
    std::copy(h_prev.begin(), h_prev.end(), out.z.begin());
    std::copy(x.begin(), x.end(), out.z.begin() + static_cast<std::ptrdiff_t>(H));

    if (kind == CellKind::rnn_tanh) {
        affine(layer.Wc, layer.bc, out.z, out.h);
        for (double& v : out.h) v = std::tanh(v);
        out.f.clear();
        out.i.clear();
        out.o.clear();
        out.g.clear();
        out.c_prev.clear();
        out.c.clear();
        out.tanh_c.clear();
        return;
    }

    if (c_prev.size() != H)
        throw std::invalid_argument("lstm: cell state dimension does not match the layer");
    affine(layer.Wf, layer.bf, out.z, out.f);
    affine(layer.Wi, layer.bi, out.z, out.i);
    affine(layer.Wo, layer.bo, out.z, out.o);
    affine(layer.Wc, layer.bc, out.z, out.g);
    for (double& v : out.f) v = sigmoid(v);
    for (double& v : out.i) v = sigmoid(v);
    for (double& v : out.o) v = sigmoid(v);
    for (double& v : out.g) v = std::tanh(v);

    out.c_prev.assign(c_prev.begin(), c_prev.end());
    out.c.resize(H);
    out.tanh_c.resize(H);
    out.h.resize(H);
    for (std::size_t r = 0; r < H; ++r) {
        assert(out.f[r] >= 0.0 && out.f[r] <= 1.0);
        assert(out.i[r] >= 0.0 && out.i[r] <= 1.0);
        assert(out.o[r] >= 0.0 && out.o[r] <= 1.0);
        assert(out.g[r] >= -1.0 && out.g[r] <= 1.0);
        out.c[r] = out.f[r] * c_prev[r] + out.i[r] * out.g[r];
        out.tanh_c[r] = std::tanh(out.c[r]);
        out.h[r] = out.o[r] * out.tanh_c[r];
    }
}

double forward(const Network& net, std::span<const double> sequence, Tape* tape) {
    check_shapes(net);
    if (sequence.empty() || sequence.size() % net.input_size != 0)
        throw std::invalid_argument("lstm: sequence length must be a positive multiple of the input size");
    const std::size_t T = sequence.size() / net.input_size;
    const std::size_t H = net.hidden_size;
    const std::size_t L = net.layers.size();

    Tape local;
    Tape& tp = tape ? *tape : local;
    tp.steps.assign(L, std::vector<StepTape>(T));

    std::vector<std::vector<double>> h(L, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> c(L, std::vector<double>(H, 0.0));
    for (std::size_t t = 0; t < T; ++t) {
        std::span<const double> x = sequence.subspan(t * net.input_size, net.input_size);
        for (std::size_t l = 0; l < L; ++l) {
            StepTape& st = tp.steps[l][t];
            cell_forward(net.layers[l], net.cell, x, h[l], c[l], st);
            h[l] = st.h;
            if (net.cell == CellKind::lstm) c[l] = st.c;
            x = std::span<const double>(h[l]);
        }
    }

    const std::vector<double>& top = h[L - 1];
    const std::vector<double>* head_in = &top;
    if (net.dense_size > 0) {
        affine(net.dense_w, net.dense_b, top, tp.dense_pre);
        tp.dense_out = tp.dense_pre;
        for (double& v : tp.dense_out) v = std::max(0.0, v);
        head_in = &tp.dense_out;
    } else {
        tp.dense_pre.clear();
        tp.dense_out.clear();
    }
    double pred = net.head_b;
    for (std::size_t k = 0; k < net.head_w.size(); ++k) pred += net.head_w[k] * (*head_in)[k];
    tp.prediction = pred;
    return pred;
}

double loss(const Network& net, const std::vector<std::vector<double>>& inputs,
            const std::vector<double>& targets) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw std::invalid_argument("lstm: loss needs matching, non-empty inputs and targets");
    double acc = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const double d = forward(net, inputs[k]) - targets[k];
        acc += d * d;
    }
    return acc / static_cast<double>(inputs.size());
}

namespace {

// Backpropagation through one sample; dL/dprediction is given. Gradients
// are accumulated (not overwritten) into `grads`.
void sample_backward(const Network& net, const Tape& tp, double dpred, Network& grads) {
    const std::size_t H = net.hidden_size;
    const std::size_t L = net.layers.size();
    const std::size_t T = tp.steps[0].size();

    const std::vector<double>& top_h = tp.steps[L - 1][T - 1].h;
    std::vector<double> dtop(H, 0.0);
    if (net.dense_size > 0) {
        std::vector<double> dpre(net.dense_size, 0.0);
        for (std::size_t j = 0; j < net.dense_size; ++j) {
            grads.head_w[j] += dpred * tp.dense_out[j];
            const double du = net.head_w[j] * dpred;
            dpre[j] = tp.dense_pre[j] > 0.0 ? du : 0.0;
        }
        grads.head_b += dpred;
        affine_backward(net.dense_w, top_h, dpre, grads.dense_w, grads.dense_b, dtop);
    } else {
        for (std::size_t k = 0; k < H; ++k) {
            grads.head_w[k] += dpred * top_h[k];
            dtop[k] = net.head_w[k] * dpred;
        }
        grads.head_b += dpred;
    }

    // dh arriving from the layer above, one slot per timestep; the top layer
    // only receives the head's contribution at the last step.
    std::vector<std::vector<double>> dh_above(T, std::vector<double>());
    dh_above[T - 1] = std::move(dtop);

    std::vector<double> dz;
    for (std::size_t l = L; l-- > 0;) {
        const LayerWeights& layer = net.layers[l];
        LayerWeights& glayer = grads.layers[l];
        const std::size_t S = layer.hidden_size + layer.input_size;
        std::vector<std::vector<double>> dx_below(T);
        std::vector<double> dh_rec(H, 0.0), dc_rec(H, 0.0);
        std::vector<double> dh(H), da(H);
        std::vector<double> daf(H), dai(H), dao(H), dag(H);
        for (std::size_t t = T; t-- > 0;) {
            const StepTape& st = tp.steps[l][t];
            for (std::size_t r = 0; r < H; ++r)
                dh[r] = dh_rec[r] + (dh_above[t].empty() ? 0.0 : dh_above[t][r]);
            dz.assign(S, 0.0);
            if (net.cell == CellKind::rnn_tanh) {
                for (std::size_t r = 0; r < H; ++r) da[r] = dh[r] * (1.0 - st.h[r] * st.h[r]);
                affine_backward(layer.Wc, st.z, da, glayer.Wc, glayer.bc, dz);
            } else {
                for (std::size_t r = 0; r < H; ++r) {
                    const double dc = dc_rec[r] + dh[r] * st.o[r] * (1.0 - st.tanh_c[r] * st.tanh_c[r]);
                    const double do_ = dh[r] * st.tanh_c[r];
                    daf[r] = dc * st.c_prev[r] * st.f[r] * (1.0 - st.f[r]);
                    dai[r] = dc * st.g[r] * st.i[r] * (1.0 - st.i[r]);
                    dao[r] = do_ * st.o[r] * (1.0 - st.o[r]);
                    dag[r] = dc * st.i[r] * (1.0 - st.g[r] * st.g[r]);
                    dc_rec[r] = dc * st.f[r];
                }
                affine_backward(layer.Wf, st.z, daf, glayer.Wf, glayer.bf, dz);
                affine_backward(layer.Wi, st.z, dai, glayer.Wi, glayer.bi, dz);
                affine_backward(layer.Wo, st.z, dao, glayer.Wo, glayer.bo, dz);
                affine_backward(layer.Wc, st.z, dag, glayer.Wc, glayer.bc, dz);
            }
            std::copy(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(H), dh_rec.begin());
            dx_below[t].assign(dz.begin() + static_cast<std::ptrdiff_t>(H), dz.end());
        }
        dh_above = std::move(dx_below);
    }
}

}  // namespace

double batch_gradients(const Network& net, std::span<const std::vector<double>* const> inputs,
                       std::span<const double> targets, Network& grads) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw std::invalid_argument("lstm: gradient batch needs matching, non-empty inputs and targets");
    const double scale = 1.0 / static_cast<double>(inputs.size());
    double acc = 0.0;
    Tape tape;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const double pred = forward(net, *inputs[k], &tape);
        const double diff = pred - targets[k];
        acc += diff * diff;
        sample_backward(net, tape, 2.0 * diff * scale, grads);
    }
    return acc * scale;
}

double batch_gradients(const Network& net, const std::vector<std::vector<double>>& inputs,
                       const std::vector<double>& targets, Network& grads) {
    std::vector<const std::vector<double>*> ptrs;
    ptrs.reserve(inputs.size());
    for (const std::vector<double>& x : inputs) ptrs.push_back(&x);
    return batch_gradients(net, ptrs, targets, grads);
}

TrainResult train(Network& net, const std::vector<std::vector<double>>& train_inputs,
                  const std::vector<double>& train_targets,
                  const std::vector<std::vector<double>>& val_inputs,
                  const std::vector<double>& val_targets, const TrainConfig& config) {
    check_shapes(net);
    config.validate();
    if (train_inputs.empty() || train_inputs.size() != train_targets.size())
        throw std::invalid_argument("lstm: training needs matching, non-empty inputs and targets");
    if (val_inputs.size() != val_targets.size())
        throw std::invalid_argument("lstm: validation inputs and targets differ in length");

    std::vector<double*> params = param_ptrs(net);
    Network grads = zeros_like(net);
    std::vector<double*> gptrs = param_ptrs(grads);
    const std::size_t n_params = params.size();
    std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
    std::size_t adam_t = 0;

    std::vector<std::size_t> order(train_inputs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    RandomSource rng(config.seed);

    TrainResult result;
    const bool monitor_val = !val_inputs.empty();
    double best_monitor = std::numeric_limits<double>::infinity();
    std::vector<double> best_params(n_params);
    for (std::size_t k = 0; k < n_params; ++k) best_params[k] = *params[k];
    std::size_t since_best = 0;

    std::vector<const std::vector<double>*> batch_x;
    std::vector<double> batch_y;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            batch_x.clear();
            batch_y.clear();
            for (std::size_t k = start; k < stop; ++k) {
                batch_x.push_back(&train_inputs[order[k]]);
                batch_y.push_back(train_targets[order[k]]);
            }
            for (double* g : gptrs) *g = 0.0;
            batch_gradients(net, batch_x, batch_y, grads);

            ++adam_t;
            const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(adam_t));
            for (std::size_t k = 0; k < n_params; ++k) {
                const double g = *gptrs[k];
                m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
                v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
                *params[k] -= config.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + config.adam_epsilon);
            }
        }

        const double train_l = loss(net, train_inputs, train_targets);
        const double val_l = monitor_val ? loss(net, val_inputs, val_targets) : train_l;
        if (!std::isfinite(train_l) || !std::isfinite(val_l))
            throw std::runtime_error("lstm: training diverged at epoch " + std::to_string(epoch));
        result.train_loss.push_back(train_l);
        result.val_loss.push_back(val_l);

        const double monitor = monitor_val ? val_l : train_l;
        if (monitor < best_monitor) {
            best_monitor = monitor;
            result.best_epoch = epoch;
            for (std::size_t k = 0; k < n_params; ++k) best_params[k] = *params[k];
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    for (std::size_t k = 0; k < n_params; ++k) *params[k] = best_params[k];
    return result;
}

double gradient_check(const Network& net, const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& targets, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("lstm: finite-difference step must be > 0");
    Network work = net;
    Network grads = zeros_like(net);
    batch_gradients(work, inputs, targets, grads);
    std::vector<double*> params = param_ptrs(work);
    std::vector<double*> gptrs = param_ptrs(grads);
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = *params[k];
        *params[k] = saved + step;
        const double up = loss(work, inputs, targets);
        *params[k] = saved - step;
        const double down = loss(work, inputs, targets);
        *params[k] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic = *gptrs[k];
        const double rel = std::abs(analytic - numeric) /
                           std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
        worst = std::max(worst, rel);
    }
    return worst;
}

std::string write(const Network& net) {
    kv::Document doc;
    doc.set("format", "lstm/1");
    doc.set("cell", cell_kind_name(net.cell));
    doc.set("input_size", static_cast<std::int64_t>(net.input_size));
    doc.set("hidden_size", static_cast<std::int64_t>(net.hidden_size));
    doc.set("num_layers", static_cast<std::int64_t>(net.layers.size()));
    doc.set("dense_size", static_cast<std::int64_t>(net.dense_size));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerWeights& layer = net.layers[l];
        const std::string tag = "layer_" + std::to_string(l) + "_";
        if (net.cell == CellKind::lstm) {
            doc.set_doubles(tag + "Wf", layer.Wf);
            doc.set_doubles(tag + "bf", layer.bf);
            doc.set_doubles(tag + "Wi", layer.Wi);
            doc.set_doubles(tag + "bi", layer.bi);
            doc.set_doubles(tag + "Wo", layer.Wo);
            doc.set_doubles(tag + "bo", layer.bo);
        }
        doc.set_doubles(tag + "Wc", layer.Wc);
        doc.set_doubles(tag + "bc", layer.bc);
    }
    doc.set_doubles("dense_w", net.dense_w);
    doc.set_doubles("dense_b", net.dense_b);
    doc.set_doubles("head_w", net.head_w);
    doc.set("head_b", net.head_b);
    return doc.str();
}

Network read(const std::string& text) {
    const kv::Document doc = kv::Document::parse(text);
    if (doc.get("format") != "lstm/1")
        throw SchemaError("lstm: unsupported model format '" + doc.get("format") + "'");
    Network net;
    net.cell = cell_kind_from_name(doc.get("cell"));
    net.input_size = static_cast<std::size_t>(doc.get_int("input_size"));
    net.hidden_size = static_cast<std::size_t>(doc.get_int("hidden_size"));
    net.dense_size = static_cast<std::size_t>(doc.get_int("dense_size"));
    const std::size_t num_layers = static_cast<std::size_t>(doc.get_int("num_layers"));
    if (num_layers < 1) throw SchemaError("lstm: stored network has no layers");
    for (std::size_t l = 0; l < num_layers; ++l) {
        LayerWeights layer;
        layer.input_size = l == 0 ? net.input_size : net.hidden_size;
        layer.hidden_size = net.hidden_size;
        const std::string tag = "layer_" + std::to_string(l) + "_";
        const std::size_t mat = layer.hidden_size * (layer.hidden_size + layer.input_size);
        if (net.cell == CellKind::lstm) {
            layer.Wf = doc.get_doubles(tag + "Wf");
            layer.bf = doc.get_doubles(tag + "bf");
            layer.Wi = doc.get_doubles(tag + "Wi");
            layer.bi = doc.get_doubles(tag + "bi");
            layer.Wo = doc.get_doubles(tag + "Wo");
            layer.bo = doc.get_doubles(tag + "bo");
            if (layer.Wf.size() != mat || layer.Wi.size() != mat || layer.Wo.size() != mat ||
                layer.bf.size() != net.hidden_size || layer.bi.size() != net.hidden_size ||
                layer.bo.size() != net.hidden_size)
                throw SchemaError("lstm: layer " + std::to_string(l) + " has malformed gate blocks");
        }
        layer.Wc = doc.get_doubles(tag + "Wc");
        layer.bc = doc.get_doubles(tag + "bc");
        if (layer.Wc.size() != mat || layer.bc.size() != net.hidden_size)
            throw SchemaError("lstm: layer " + std::to_string(l) + " has malformed candidate block");
        net.layers.push_back(std::move(layer));
    }
    net.dense_w = doc.get_doubles("dense_w");
    net.dense_b = doc.get_doubles("dense_b");
    net.head_w = doc.get_doubles("head_w");
    net.head_b = doc.get_double("head_b");
    if (net.dense_w.size() != net.dense_size * net.hidden_size ||
        net.dense_b.size() != net.dense_size)
        throw SchemaError("lstm: malformed dense layer");
    if (net.head_w.size() != (net.dense_size > 0 ? net.dense_size : net.hidden_size))
        throw SchemaError("lstm: malformed head");
    check_shapes(net);
    return net;
}

}  // namespace wolfcast::lstm
