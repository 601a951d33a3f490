#include "topotrace/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "topotrace/errors.hpp"

namespace topo {

namespace {

constexpr double kLeakySlope = 0.2;  // leaky ReLU is max(x, 0.2x)

double activate(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::Relu: return x > 0.0 ? x : 0.0;
        case ActivationKind::LeakyRelu: return x > 0.0 ? x : kLeakySlope * x;
    }
    return x;
}

// derivative expressed through the post-activation value where convenient
double activate_grad(ActivationKind kind, double pre, double post) {
    switch (kind) {
        case ActivationKind::Tanh: return 1.0 - post * post;
        case ActivationKind::Relu: return pre > 0.0 ? 1.0 : 0.0;
        case ActivationKind::LeakyRelu: return pre > 0.0 ? 1.0 : kLeakySlope;
    }
    return 1.0;
}

void softmax_row(std::span<const double> in, std::span<double> out) {
    const double peak = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = std::exp(in[i] - peak);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
}

}  // namespace

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Relu: return "relu";
        case ActivationKind::LeakyRelu: return "leaky_relu";
    }
    return "?";
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "relu") return ActivationKind::Relu;
    if (name == "leaky_relu" || name == "leaky") return ActivationKind::LeakyRelu;
    throw ParamError("unknown activation: " + name);
}

Mlp Mlp::init(std::vector<std::size_t> widths, ActivationKind activation,
              std::uint64_t seed) {
    if (widths.size() < 2) throw ParamError("Mlp: need at least input and output widths");
    Mlp net;
    net.widths = std::move(widths);
    net.activation = activation;
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j + 1 < net.widths.size(); ++j) {
        const std::size_t fan_in = net.widths[j], fan_out = net.widths[j + 1];
        std::vector<double> w(fan_out * fan_in);
        if (activation == ActivationKind::Tanh) {
            // 5/3 gain offsets tanh contraction, which otherwise starves
            // narrow ten-layer stacks of both signal and gradient
            const double limit =
                (5.0 / 3.0) * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (double& v : w) v = dist(rng);
        } else {
            std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
            for (double& v : w) v = dist(rng);
        }
        net.weights.push_back(std::move(w));
        // small positive bias keeps ReLU units live at the start
        net.biases.emplace_back(fan_out,
                                activation == ActivationKind::Tanh ? 0.0 : 0.01);
    }
    return net;
}

LayerTrace forward_trace(const Mlp& net, const PointCloud& cloud) {
    if (cloud.d != net.input_dim())
        throw ParamError("forward_trace: cloud dimension " + std::to_string(cloud.d) +
                         " != input width " + std::to_string(net.input_dim()));
    LayerTrace trace;
    trace.layers.reserve(net.layer_count() + 2);
    trace.layers.push_back(cloud);
    PointCloud logits(cloud.n, net.output_dim());  // last layer, pre-activation
    for (std::size_t j = 0; j < net.layer_count(); ++j) {
        const PointCloud& prev = trace.layers.back();
        const std::size_t out_w = net.widths[j + 1], in_w = net.widths[j];
        const bool last = j + 1 == net.layer_count();
        PointCloud next(cloud.n, out_w);
        for (std::size_t i = 0; i < cloud.n; ++i) {
            const auto x = prev.point(i);
            auto y = next.point(i);
            for (std::size_t r = 0; r < out_w; ++r) {
                double acc = net.biases[j][r];
                const double* wrow = net.weights[j].data() + r * in_w;
                for (std::size_t c = 0; c < in_w; ++c) acc += wrow[c] * x[c];
                if (last) logits.point(i)[r] = acc;
                y[r] = activate(net.activation, acc);
            }
        }
        trace.layers.push_back(std::move(next));
    }
    PointCloud scores(cloud.n, net.output_dim());
    for (std::size_t i = 0; i < cloud.n; ++i)
        softmax_row(logits.point(i), scores.point(i));
    trace.layers.push_back(std::move(scores));
    return trace;
}

double loss_and_grad(const Mlp& net, const PointCloud& x,
                     const std::vector<std::uint8_t>& y,
                     std::vector<std::vector<double>>* weight_grad,
                     std::vector<std::vector<double>>* bias_grad) {
    const std::size_t n = x.n;
    const std::size_t layers = net.layer_count();
    if (weight_grad) {
        weight_grad->assign(layers, {});
        bias_grad->assign(layers, {});
        for (std::size_t j = 0; j < layers; ++j) {
            (*weight_grad)[j].assign(net.weights[j].size(), 0.0);
            (*bias_grad)[j].assign(net.biases[j].size(), 0.0);
        }
    }

    // per-sample forward pass storing pre- and post-activation values
    std::vector<std::vector<double>> pre(layers), post(layers + 1);
    double total_loss = 0.0;
    std::vector<double> probs(net.output_dim());
    std::vector<double> delta, delta_prev;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.point(i);
        post[0].assign(xi.begin(), xi.end());
        for (std::size_t j = 0; j < layers; ++j) {
            const std::size_t out_w = net.widths[j + 1], in_w = net.widths[j];
            pre[j].resize(out_w);
            post[j + 1].resize(out_w);
            for (std::size_t r = 0; r < out_w; ++r) {
                double acc = net.biases[j][r];
                const double* wrow = net.weights[j].data() + r * in_w;
                for (std::size_t c = 0; c < in_w; ++c) acc += wrow[c] * post[j][c];
                pre[j][r] = acc;
                post[j + 1][r] = activate(net.activation, acc);
            }
        }
        softmax_row(pre[layers - 1], probs);
        const std::size_t target = y[i];
        total_loss += -std::log(std::max(probs[target], 1e-300));

        if (!weight_grad) continue;

        // d loss / d logits; the softmax reads pre-activation values
        delta.assign(probs.begin(), probs.end());
        delta[target] -= 1.0;
        for (std::size_t jj = layers; jj-- > 0;) {
            const std::size_t out_w = net.widths[jj + 1], in_w = net.widths[jj];
            // through the activation, except at the logits
            if (jj + 1 < layers)
                for (std::size_t r = 0; r < out_w; ++r)
                    delta[r] *= activate_grad(net.activation, pre[jj][r], post[jj + 1][r]);
            double* wg = (*weight_grad)[jj].data();
            double* bg = (*bias_grad)[jj].data();
            const double* input = post[jj].data();
            for (std::size_t r = 0; r < out_w; ++r) {
                bg[r] += delta[r];
                double* wrow = wg + r * in_w;
                for (std::size_t c = 0; c < in_w; ++c) wrow[c] += delta[r] * input[c];
            }
            if (jj > 0) {
                delta_prev.assign(in_w, 0.0);
                const double* w = net.weights[jj].data();
                for (std::size_t r = 0; r < out_w; ++r) {
                    const double dr = delta[r];
                    const double* wrow = w + r * in_w;
                    for (std::size_t c = 0; c < in_w; ++c) delta_prev[c] += dr * wrow[c];
                }
                delta.swap(delta_prev);
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    if (weight_grad) {
        for (std::size_t j = 0; j < layers; ++j) {
            for (double& g : (*weight_grad)[j]) g *= inv_n;
            for (double& g : (*bias_grad)[j]) g *= inv_n;
        }
    }
    return total_loss * inv_n;
}

double accuracy(const Mlp& net, const PointCloud& x, const std::vector<std::uint8_t>& y) {
    const LayerTrace trace = forward_trace(net, x);
    const PointCloud& scores = trace.layers.back();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.n; ++i) {
        const auto p = scores.point(i);
        const std::size_t guess =
            static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        if (guess == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(x.n);
}

TrainMetrics train(Mlp& net, const LabeledPointCloud& data, const TrainConfig& cfg) {
    if (data.class_indices(0).empty() || data.class_indices(1).empty())
        throw ParamError("train: both classes must be present");

    // stratified train/test split
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
        auto idx = data.class_indices(label);
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n_test =
            static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(idx.size())));
        test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + n_test);
        train_idx.insert(train_idx.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto gather = [&](const std::vector<std::size_t>& idx) {
        PointCloud xc = data.cloud.select(idx);
        std::vector<std::uint8_t> yc(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) yc[i] = data.labels[idx[i]];
        return std::pair{std::move(xc), std::move(yc)};
    };
    auto [x_train, y_train] = gather(train_idx);
    auto [x_test, y_test] = gather(test_idx);

    // Adam state
    const std::size_t layers = net.layer_count();
    std::vector<std::vector<double>> mw(layers), vw(layers), mb(layers), vb(layers);
    for (std::size_t j = 0; j < layers; ++j) {
        mw[j].assign(net.weights[j].size(), 0.0);
        vw[j].assign(net.weights[j].size(), 0.0);
        mb[j].assign(net.biases[j].size(), 0.0);
        vb[j].assign(net.biases[j].size(), 0.0);
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;

    std::vector<std::vector<double>> wg, bg;
    TrainMetrics metrics;
    std::size_t perfect_streak = 0;
    std::size_t adam_step = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stalled = 0;

    std::vector<std::size_t> order(x_train.n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch =
        cfg.batch_size == 0 ? x_train.n : std::min(cfg.batch_size, x_train.n);

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double lr =
            cfg.learning_rate *
            std::pow(cfg.decay_eta, static_cast<double>(epoch) / cfg.decay_divisor);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        if (batch < x_train.n) std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < x_train.n; start += batch) {
            const std::size_t stop = std::min(start + batch, x_train.n);
            PointCloud xb;
            std::vector<std::uint8_t> yb;
            const PointCloud* xp = &x_train;
            const std::vector<std::uint8_t>* yp = &y_train;
            if (batch < x_train.n) {
                std::vector<std::size_t> sel(order.begin() + start, order.begin() + stop);
                xb = x_train.select(sel);
                yb.resize(sel.size());
                for (std::size_t i = 0; i < sel.size(); ++i) yb[i] = y_train[sel[i]];
                xp = &xb;
                yp = &yb;
            }
            const double loss = loss_and_grad(net, *xp, *yp, &wg, &bg);
            if (!std::isfinite(loss))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch));
            epoch_loss += loss;
            ++batches;

            ++adam_step;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_step));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_step));
            for (std::size_t j = 0; j < layers; ++j) {
                auto update = [&](std::vector<double>& param, std::vector<double>& m,
                                  std::vector<double>& v, const std::vector<double>& g) {
                    for (std::size_t i = 0; i < param.size(); ++i) {
                        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
                        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
                        param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
                    }
                };
                update(net.weights[j], mw[j], vw[j], wg[j]);
                update(net.biases[j], mb[j], vb[j], bg[j]);
            }
        }

        const double acc = accuracy(net, x_train, y_train);
        const double mean_loss = epoch_loss / static_cast<double>(batches);
        metrics.loss.push_back(mean_loss);
        metrics.train_acc.push_back(acc);
        metrics.epochs_run = epoch + 1;
        // perfect accuracy alone leaves thin margins; wait for the loss too
        perfect_streak = (acc == 1.0 && mean_loss <= cfg.loss_stop) ? perfect_streak + 1 : 0;
        if (perfect_streak >= cfg.patience) break;
        if (mean_loss < best_loss - 1e-9) {
            best_loss = mean_loss;
            stalled = 0;
        } else if (cfg.stall_epochs > 0 && ++stalled >= cfg.stall_epochs && acc < 1.0) {
            break;  // dead network, the gradient is not coming back
        }
    }

    metrics.final_train_acc = metrics.train_acc.empty() ? 0.0 : metrics.train_acc.back();
    metrics.final_test_error = x_test.n == 0 ? 0.0 : 1.0 - accuracy(net, x_test, y_test);
    metrics.well_trained = metrics.final_train_acc == 1.0 &&
                           metrics.final_test_error <= cfg.test_error_threshold;
    return metrics;
}

std::string TrainMetrics::to_csv() const {
    std::string out = "epoch,loss,train_acc\n";
    char buf[96];
    for (std::size_t e = 0; e < loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, loss[e], train_acc[e]);
        out += buf;
    }
    return out;
}

void save_model(const Mlp& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_model: cannot open " + path);
    out << "topotrace-mlp 1\n";
    out << "activation " << to_string(net.activation) << '\n';
    out << "widths";
    for (std::size_t w : net.widths) out << ' ' << w;
    out << '\n';
    char buf[48];
    for (std::size_t j = 0; j < net.layer_count(); ++j) {
        for (double v : net.weights[j]) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            out << buf;
        }
        for (double v : net.biases[j]) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            out << buf;
        }
    }
    if (!out) throw IoError("save_model: write failure on " + path);
}

Mlp load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_model: cannot open " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "topotrace-mlp")
        throw IoError("load_model: not a model file: " + path);
    if (version != 1) throw IoError("load_model: unsupported version");

    std::string key, act;
    if (!(in >> key >> act) || key != "activation") throw IoError("load_model: corrupt header");
    Mlp net;
    net.activation = activation_from_string(act);
    if (!(in >> key) || key != "widths") throw IoError("load_model: corrupt header");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ws(rest);
    std::size_t w;
    while (ws >> w) net.widths.push_back(w);
    if (net.widths.size() < 2) throw IoError("load_model: corrupt widths");

    for (std::size_t j = 0; j + 1 < net.widths.size(); ++j) {
        std::vector<double> weights(net.widths[j + 1] * net.widths[j]);
        std::vector<double> biases(net.widths[j + 1]);
        for (double& v : weights)
            if (!(in >> v)) throw IoError("load_model: truncated file");
        for (double& v : biases)
            if (!(in >> v)) throw IoError("load_model: truncated file");
        net.weights.push_back(std::move(weights));
        net.biases.push_back(std::move(biases));
    }
    return net;
}

}  // namespace topo
