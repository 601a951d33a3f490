#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topotrace/datagen.hpp"
#include "topotrace/geometry.hpp"

namespace topo {

enum class ActivationKind { Tanh, Relu, LeakyRelu };  // leaky slope fixed at 0.2

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

/// Fully connected net: layer j maps width[j] -> width[j+1] via an affine
/// map followed by the activation; softmax is the score function on top of
/// the final layer.
struct Mlp {
    std::vector<std::size_t> widths;  // input, hidden..., output (= 2)
    ActivationKind activation = ActivationKind::Relu;
    std::vector<std::vector<double>> weights;  // [j]: widths[j+1] x widths[j], row-major
    std::vector<std::vector<double>> biases;   // [j]: widths[j+1]

    std::size_t layer_count() const { return widths.size() - 1; }
    std::size_t input_dim() const { return widths.front(); }
    std::size_t output_dim() const { return widths.back(); }

    /// He-style init for ReLU variants, Xavier-style for tanh; deterministic.
    static Mlp init(std::vector<std::size_t> widths, ActivationKind activation,
                    std::uint64_t seed);
};

/// Per-layer images of a cloud: trace[0] = input, trace[1..l] = layer
/// outputs (post-activation), trace[l+1] = softmax scores. The scores are
/// computed from the last layer's pre-activation logits; a ReLU clipped to
/// zero on both logits would otherwise block every gradient.
struct LayerTrace {
    std::vector<PointCloud> layers;
};

/// Throws ParamError when cloud dimension != net input width.
LayerTrace forward_trace(const Mlp& net, const PointCloud& cloud);

struct TrainConfig {
    double learning_rate = 0.003;  // Adam; deep narrow ReLU stacks die above ~0.01
    double decay_eta = 0.1;        // lr(t) = learning_rate * decay_eta^(t / decay_divisor)
    double decay_divisor = 2500;   // 4000 with decay_eta = 0.5 for bottlenecks
    std::size_t max_epochs = 18000;
    std::size_t batch_size = 32;   // 0 = full batch; small batches smooth the boundary
    std::uint64_t seed = 1;
    double test_fraction = 0.2;
    double test_error_threshold = 1e-4;  // <= 0.01% for synthetic data
    double loss_stop = 5e-4;       // patience counts only below this mean loss
    std::size_t patience = 50;     // consecutive 100%-accuracy low-loss epochs before stop
    std::size_t stall_epochs = 1000;  // abort early when the loss stops moving
};

struct TrainMetrics {
    std::vector<double> loss;       // per epoch
    std::vector<double> train_acc;  // per epoch
    std::size_t epochs_run = 0;
    double final_train_acc = 0.0;
    double final_test_error = 1.0;
    bool well_trained = false;

    std::string to_csv() const;  // epoch,loss,train_acc
};

/// Adam on softmax cross-entropy with exponential learning-rate decay.
/// Stops at sustained 100% train accuracy or max_epochs. Throws
/// TrainingError on divergence (non-finite loss), with the epoch index.
TrainMetrics train(Mlp& net, const LabeledPointCloud& data, const TrainConfig& cfg);

/// Mean cross-entropy over (X, y) and its gradient; exposed so tests can
/// check backprop against finite differences.
double loss_and_grad(const Mlp& net, const PointCloud& x,
                     const std::vector<std::uint8_t>& y,
                     std::vector<std::vector<double>>* weight_grad,
                     std::vector<std::vector<double>>* bias_grad);

double accuracy(const Mlp& net, const PointCloud& x, const std::vector<std::uint8_t>& y);

/// Versioned text format; weights round-trip bit-exactly.
void save_model(const Mlp& net, const std::string& path);
Mlp load_model(const std::string& path);

}  // namespace topo
