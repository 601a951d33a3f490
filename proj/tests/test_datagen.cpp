#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "topotrace/datagen.hpp"
#include "topotrace/errors.hpp"

using topo::DatasetSpec;
using topo::Family;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("generation is deterministic") {
    DatasetSpec spec;
    spec.family = Family::D2;
    spec.n_train = 600;
    spec.seed = 5;
    auto a = topo::generate(spec);
    auto b = topo::generate(spec);
    CHECK(a.cloud.coords == b.cloud.coords);
    CHECK(a.labels == b.labels);
    spec.seed = 6;
    CHECK(topo::generate(spec).cloud.coords != a.cloud.coords);
}

TEST_CASE("d1 shape, labels and truth") {
    DatasetSpec spec;
    spec.family = Family::D1;
    spec.n_train = 1950;
    auto data = topo::generate(spec);
    CHECK(data.cloud.d == 2);
    CHECK(data.cloud.n > 1500);
    CHECK(*data.truth_a == topo::BettiVector{9, 0});
    CHECK(*data.truth_b == topo::BettiVector{1, 9});
    CHECK(data.class_cloud(0).n + data.class_cloud(1).n == data.cloud.n);
    CHECK(topo::min_interclass_distance(data) >= 0.10);
}

TEST_CASE("d2 shape, labels and truth") {
    DatasetSpec spec;
    spec.family = Family::D2;
    spec.n_train = 2000;
    auto data = topo::generate(spec);
    CHECK(data.cloud.d == 3);
    CHECK(*data.truth_a == topo::BettiVector{9, 9, 0});
    CHECK(*data.truth_b == topo::BettiVector{9, 9, 0});
    CHECK(topo::min_interclass_distance(data) > 0.0);
}

TEST_CASE("d3 shape, labels and truth") {
    DatasetSpec spec;
    spec.family = Family::D3;
    spec.n_train = 2000;
    auto data = topo::generate(spec);
    CHECK(data.cloud.d == 3);
    CHECK(*data.truth_a == topo::BettiVector{9, 0, 9});
    CHECK(*data.truth_b == topo::BettiVector{18, 0, 9});
    CHECK(topo::min_interclass_distance(data) > 0.0);
}

TEST_CASE("csv family cannot be generated") {
    DatasetSpec spec;
    spec.family = Family::Csv;
    CHECK_THROWS_AS(topo::generate(spec), topo::ParamError);
}

TEST_CASE("known manifold truths") {
    auto sphere = topo::sample_known_manifold(topo::ManifoldKind::Sphere, 300, 1);
    CHECK(*sphere.truth_a == topo::BettiVector{1, 0, 1});
    CHECK(sphere.cloud.d == 3);
    auto solid = topo::sample_known_manifold(topo::ManifoldKind::SolidTorus, 300, 1);
    CHECK(*solid.truth_a == topo::BettiVector{1, 1, 0});
    auto surface = topo::sample_known_manifold(topo::ManifoldKind::TorusSurface, 300, 1);
    CHECK(*surface.truth_a == topo::BettiVector{1, 2, 1});
}

TEST_CASE("stratified subsample is proportional, sorted and deterministic") {
    DatasetSpec spec;
    spec.family = Family::D1;
    spec.n_train = 1950;
    auto data = topo::generate(spec);
    auto sub = topo::stratified_subsample(data, 650, 7);
    CHECK(sub.size() >= 648);
    CHECK(sub.size() <= 652);
    CHECK(std::is_sorted(sub.begin(), sub.end()));
    CHECK(sub == topo::stratified_subsample(data, 650, 7));
    CHECK(sub != topo::stratified_subsample(data, 650, 8));

    double total_a = 0, sub_a = 0;
    for (auto l : data.labels) total_a += l == 0;
    for (auto i : sub) sub_a += data.labels[i] == 0;
    CHECK(sub_a / static_cast<double>(sub.size()) ==
          doctest::Approx(total_a / static_cast<double>(data.labels.size()))
              .epsilon(0.02));
}

TEST_CASE("csv round trip preserves every coordinate bit") {
    DatasetSpec spec;
    spec.family = Family::D2;
    spec.n_train = 200;
    auto data = topo::generate(spec);
    auto path = temp_file("roundtrip.csv");
    topo::save_csv(data, path.string());
    auto loaded = topo::load_csv(path.string());
    CHECK(loaded.cloud.coords == data.cloud.coords);
    CHECK(loaded.labels == data.labels);
    std::filesystem::remove(path);
}

TEST_CASE("csv loader accepts headers and numeric labels") {
    auto path = temp_file("labels.csv");
    {
        std::ofstream out(path);
        out << "x,y,label\n0,0,a\n1,0,b\n0.5,1,0\n0.5,-1,1\n";
    }
    auto data = topo::load_csv(path.string());
    CHECK(data.cloud.n == 4);
    CHECK(data.labels == std::vector<std::uint8_t>{0, 1, 0, 1});
    std::filesystem::remove(path);
}

TEST_CASE("csv loader reports the offending line") {
    auto path = temp_file("bad.csv");
    {
        std::ofstream out(path);
        out << "0,0,a\n1,oops,b\n";
    }
    CHECK_THROWS_WITH_AS(topo::load_csv(path.string()),
                         doctest::Contains("line 2"), topo::ParseError);
    {
        std::ofstream out(path);
        out << "0,0,a\n1,2,3,b\n";  // ragged row
    }
    CHECK_THROWS_AS(topo::load_csv(path.string()), topo::ParseError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(topo::load_csv("/nonexistent/x.csv"), topo::IoError);
}

TEST_CASE("jitter perturbs without relabeling") {
    DatasetSpec spec;
    spec.family = Family::D1;
    spec.n_train = 400;
    auto clean = topo::generate(spec);
    spec.jitter = 0.01;
    auto noisy = topo::generate(spec);
    CHECK(noisy.labels == clean.labels);
    CHECK(noisy.cloud.coords != clean.cloud.coords);
}
