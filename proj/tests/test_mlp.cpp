#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "topotrace/errors.hpp"
#include "topotrace/mlp.hpp"

using topo::ActivationKind;
using topo::Mlp;
using topo::PointCloud;

namespace {

topo::LabeledPointCloud two_blobs(std::size_t per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    topo::LabeledPointCloud data;
    data.cloud = PointCloud(2 * per_class, 2);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        double cx = i < per_class ? -2.0 : 2.0;
        data.cloud.coords[2 * i] = cx + noise(rng);
        data.cloud.coords[2 * i + 1] = noise(rng);
        data.labels.push_back(i < per_class ? 0 : 1);
    }
    return data;
}

}  // namespace

TEST_CASE("activation names round trip") {
    for (auto kind : {ActivationKind::Tanh, ActivationKind::Relu,
                      ActivationKind::LeakyRelu})
        CHECK(topo::activation_from_string(topo::to_string(kind)) == kind);
    CHECK_THROWS_AS(topo::activation_from_string("sigmoid"), topo::ParamError);
}

TEST_CASE("init shapes and determinism") {
    auto net = Mlp::init({3, 8, 4, 2}, ActivationKind::Relu, 42);
    CHECK(net.layer_count() == 3);
    CHECK(net.weights[0].size() == 24);
    CHECK(net.weights[2].size() == 8);
    CHECK(net.biases[1].size() == 4);
    auto again = Mlp::init({3, 8, 4, 2}, ActivationKind::Relu, 42);
    CHECK(net.weights == again.weights);
    auto other = Mlp::init({3, 8, 4, 2}, ActivationKind::Relu, 43);
    CHECK(net.weights != other.weights);
}

TEST_CASE("forward trace has layer_count + 2 stages and softmax rows") {
    auto net = Mlp::init({2, 5, 3, 2}, ActivationKind::Tanh, 1);
    PointCloud cloud(4, 2);
    for (std::size_t i = 0; i < 8; ++i) cloud.coords[i] = 0.1 * static_cast<double>(i);
    auto trace = topo::forward_trace(net, cloud);
    REQUIRE(trace.layers.size() == 5);
    CHECK(trace.layers[0] == cloud);
    CHECK(trace.layers[1].d == 5);
    CHECK(trace.layers[2].d == 3);
    CHECK(trace.layers[3].d == 2);
    CHECK(trace.layers[4].d == 2);
    for (std::size_t i = 0; i < 4; ++i) {
        auto row = trace.layers[4].point(i);
        CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row[0] >= 0.0);
        CHECK(row[1] >= 0.0);
    }
    PointCloud wrong(2, 3);
    CHECK_THROWS_AS(topo::forward_trace(net, wrong), topo::ParamError);
}

TEST_CASE("backprop matches central finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto kind : {ActivationKind::Tanh, ActivationKind::Relu,
                      ActivationKind::LeakyRelu}) {
        auto net = Mlp::init({3, 4, 4, 2}, kind, 11);
        PointCloud x(6, 3);
        for (auto& c : x.coords) c = u(rng);
        std::vector<std::uint8_t> y{0, 1, 0, 1, 1, 0};

        std::vector<std::vector<double>> wg, bg;
        topo::loss_and_grad(net, x, y, &wg, &bg);

        const double h = 1e-6;
        double worst = 0.0;
        auto check_param = [&](double& param, double grad) {
            double keep = param;
            param = keep + h;
            double up = topo::loss_and_grad(net, x, y, nullptr, nullptr);
            param = keep - h;
            double down = topo::loss_and_grad(net, x, y, nullptr, nullptr);
            param = keep;
            double fd = (up - down) / (2 * h);
            double scale = std::max({std::abs(fd), std::abs(grad), 1e-4});
            worst = std::max(worst, std::abs(fd - grad) / scale);
        };
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].size(); ++i)
                check_param(net.weights[l][i], wg[l][i]);
            for (std::size_t i = 0; i < net.biases[l].size(); ++i)
                check_param(net.biases[l][i], bg[l][i]);
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("training separates two blobs") {
    auto data = two_blobs(40, 3);
    auto net = Mlp::init({2, 6, 2}, ActivationKind::Relu, 3);
    topo::TrainConfig cfg;
    cfg.max_epochs = 2000;
    cfg.seed = 3;
    auto metrics = topo::train(net, data, cfg);
    CHECK(metrics.final_train_acc == 1.0);
    CHECK(metrics.well_trained);
    CHECK(metrics.epochs_run < cfg.max_epochs);  // patience stop kicked in
    CHECK(metrics.loss.size() == metrics.epochs_run);
    CHECK(metrics.loss.back() < metrics.loss.front());
}

TEST_CASE("training is deterministic given the seed") {
    auto data = two_blobs(20, 9);
    topo::TrainConfig cfg;
    cfg.max_epochs = 300;
    cfg.seed = 5;
    auto a = Mlp::init({2, 4, 2}, ActivationKind::Tanh, 5);
    auto b = Mlp::init({2, 4, 2}, ActivationKind::Tanh, 5);
    topo::train(a, data, cfg);
    topo::train(b, data, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
}

TEST_CASE("model save/load round trips bit-exactly") {
    auto net = Mlp::init({2, 7, 2}, ActivationKind::LeakyRelu, 21);
    auto path = std::filesystem::temp_directory_path() / "model_roundtrip.txt";
    topo::save_model(net, path.string());
    auto loaded = topo::load_model(path.string());
    CHECK(loaded.widths == net.widths);
    CHECK(loaded.activation == net.activation);
    CHECK(loaded.weights == net.weights);
    CHECK(loaded.biases == net.biases);
    std::filesystem::remove(path);
}

TEST_CASE("model loader rejects bad files") {
    auto path = std::filesystem::temp_directory_path() / "model_bad.txt";
    {
        std::ofstream out(path);
        out << "not-a-model 9\n";
    }
    CHECK_THROWS_AS(topo::load_model(path.string()), topo::IoError);
    auto net = Mlp::init({2, 3, 2}, ActivationKind::Relu, 1);
    topo::save_model(net, path.string());
    auto text = [&] {
        std::ifstream in(path);
        return std::string(std::istreambuf_iterator<char>(in), {});
    }();
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);  // truncate
    }
    CHECK_THROWS_AS(topo::load_model(path.string()), topo::IoError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(topo::load_model("/nonexistent/model.txt"), topo::IoError);
}

TEST_CASE("accuracy counts argmax agreement") {
    Mlp net;
    net.widths = {1, 2};
    net.activation = ActivationKind::Relu;
    net.weights = {{1.0, -1.0}};  // column: score_0 = x, score_1 = -x
    net.biases = {{0.0, 0.0}};
    PointCloud x(2, 1);
    x.coords = {1.0, -1.0};
    CHECK(topo::accuracy(net, x, {0, 1}) == doctest::Approx(1.0));
    CHECK(topo::accuracy(net, x, {1, 0}) == doctest::Approx(0.0));
}
