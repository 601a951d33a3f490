#include "topotrace/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "topotrace/errors.hpp"

namespace topo {

namespace {

constexpr double kPi = std::numbers::pi;

// D-I layout: 3x3 cells of side 1 inside [0,3]^2; each cell center carries a
// class-b hole of radius 0.35 with a concentric class-a disk of radius 0.25.
// The 0.10 annular gap is the class separation margin.
constexpr double kD1Side = 3.0;
// holes and disks are sized for two things at once: a wide class margin
// (hole minus disk) and wide corridors between holes (spacing minus two
// holes), since corridor points are the hardest for the classifier
constexpr double kD1HoleRadius = 0.36;
constexpr double kD1DiskRadius = 0.18;

// D-II: solid tori with core radius 1 and tube radius 0.25; the red torus of
// a pair is offset by the core radius so the core circles link.
constexpr double kTorusR = 1.0;
constexpr double kTorusTube = 0.25;

// D-III per unit: green sphere radius 0.6 between a red sphere of radius
// 0.8 and a red ball of radius 0.15. The red shell is kept close to the
// green one so both surfaces get comparable point density from equal class
// quotas, and the ball is small so the red shell stays the ball's
// distance-wise far component even after subsampling.
constexpr double kD3Outer = 0.8;
constexpr double kD3Green = 0.6;
constexpr double kD3Ball = 0.15;

constexpr double kUnitSpacing = 4.0;  // 3x3 grid spacing for D-II/D-III units

struct Builder {
    std::vector<double> coords;
    std::vector<std::uint8_t> labels;
    std::size_t d = 0;

    void add(std::initializer_list<double> p, std::uint8_t label) {
        coords.insert(coords.end(), p.begin(), p.end());
        labels.push_back(label);
    }
    void add3(double x, double y, double z, std::uint8_t label) { add({x, y, z}, label); }

    LabeledPointCloud finish(std::optional<BettiVector> ta, std::optional<BettiVector> tb,
                             double jitter, std::uint64_t seed) {
        LabeledPointCloud out;
        out.cloud.n = labels.size();
        out.cloud.d = d;
        out.cloud.coords = std::move(coords);
        out.labels = std::move(labels);
        out.truth_a = std::move(ta);
        out.truth_b = std::move(tb);
        if (jitter > 0.0) {
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
            std::normal_distribution<double> noise(0.0, jitter);
            for (double& c : out.cloud.coords) c += noise(rng);
        }
        normalize(out.cloud);
        return out;
    }

    // Center at the origin and scale uniformly to unit RMS deviation.
    // A similarity transform: the k-NN graph, and with it every geodesic
    // quantity downstream, is unchanged; training sees standardized input.
    static void normalize(PointCloud& cloud) {
        if (cloud.n == 0) return;
        std::vector<double> mean(cloud.d, 0.0);
        for (std::size_t i = 0; i < cloud.n; ++i)
            for (std::size_t j = 0; j < cloud.d; ++j) mean[j] += cloud.coords[i * cloud.d + j];
        for (auto& m : mean) m /= static_cast<double>(cloud.n);
        double ms = 0.0;
        for (std::size_t i = 0; i < cloud.n; ++i)
            for (std::size_t j = 0; j < cloud.d; ++j) {
                double& c = cloud.coords[i * cloud.d + j];
                c -= mean[j];
                ms += c * c;
            }
        const double s = std::sqrt(ms / static_cast<double>(cloud.n * cloud.d));
        if (s > 0.0)
            for (double& c : cloud.coords) c /= s;
    }
};

std::vector<std::pair<double, double>> d1_centers() {
    std::vector<std::pair<double, double>> centers;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) centers.emplace_back(0.5 + i, 0.5 + j);
    return centers;
}

// Evenly spread points on a sphere (Fibonacci lattice).
void fibonacci_sphere(Builder& b, double cx, double cy, double cz, double radius,
                      std::size_t m, std::uint8_t label) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < m; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double theta = golden * static_cast<double>(i);
        b.add3(cx + radius * rxy * std::cos(theta), cy + radius * rxy * std::sin(theta),
               cz + radius * z, label);
    }
}

// Uniform draw from a solid torus; axis = 0 puts the core circle in the
// xy-plane, axis = 1 in the xz-plane.
void solid_torus(Builder& b, std::mt19937_64& rng, double cx, double cy, double cz,
                 int axis, std::size_t m, std::uint8_t label) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t placed = 0;
    while (placed < m) {
        const double theta = 2.0 * kPi * unit(rng);
        const double phi = 2.0 * kPi * unit(rng);
        const double rho = kTorusTube * std::sqrt(unit(rng));
        if (unit(rng) * (kTorusR + kTorusTube) > kTorusR + rho * std::cos(phi)) continue;
        const double ring = kTorusR + rho * std::cos(phi);
        const double h = rho * std::sin(phi);
        if (axis == 0)
            b.add3(cx + ring * std::cos(theta), cy + ring * std::sin(theta), cz + h, label);
        else
            b.add3(cx + ring * std::cos(theta), cy + h, cz + ring * std::sin(theta), label);
        ++placed;
    }
}

}  // namespace

PointCloud LabeledPointCloud::class_cloud(std::uint8_t label) const {
    return cloud.select(class_indices(label));
}

std::vector<std::size_t> LabeledPointCloud::class_indices(std::uint8_t label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) idx.push_back(i);
    return idx;
}

LabeledPointCloud gen_d1(const DatasetSpec& spec) {
    const std::size_t per_class = spec.n_train / 2;
    const auto centers = d1_centers();

    Builder b;
    b.d = 2;

    // class a: nine disks on per-disk grids
    const std::size_t per_disk = std::max<std::size_t>(per_class / 9, 1);
    const double ha = std::sqrt(kPi * kD1DiskRadius * kD1DiskRadius /
                                static_cast<double>(per_disk));
    if (ha > kD1DiskRadius) throw GenerationError("gen_d1: grid too coarse for disks");
    for (const auto& [cx, cy] : centers) {
        std::size_t count = 0;
        for (double x = cx - kD1DiskRadius; x <= cx + kD1DiskRadius + 1e-12; x += ha)
            for (double y = cy - kD1DiskRadius; y <= cy + kD1DiskRadius + 1e-12; y += ha) {
                const double dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy <= kD1DiskRadius * kD1DiskRadius) {
                    b.add({x, y}, 0);
                    ++count;
                }
            }
        if (count < 3) throw GenerationError("gen_d1: disk underpopulated");
    }

    // class b: square minus the nine holes
    const double area_b =
        kD1Side * kD1Side - 9.0 * kPi * kD1HoleRadius * kD1HoleRadius;
    const double hb = std::sqrt(area_b / static_cast<double>(per_class));
    for (double x = hb / 2; x < kD1Side; x += hb)
        for (double y = hb / 2; y < kD1Side; y += hb) {
            bool in_hole = false;
            for (const auto& [cx, cy] : centers) {
                const double dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy <= kD1HoleRadius * kD1HoleRadius) {
                    in_hole = true;
                    break;
                }
            }
            if (!in_hole) b.add({x, y}, 1);
        }

    return b.finish(BettiVector{9, 0}, BettiVector{1, 9}, spec.jitter, spec.seed);
}

LabeledPointCloud gen_d2(const DatasetSpec& spec) {
    if (kTorusTube * 2.0 >= kTorusR)
        throw GenerationError("gen_d2: tube radius too large, tori would overlap");
    const std::size_t per_torus = std::max<std::size_t>(spec.n_train / 18, 1);
    std::mt19937_64 rng(spec.seed);

    Builder b;
    b.d = 3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double cx = kUnitSpacing * (i - 1), cy = kUnitSpacing * (j - 1);
            // green torus: core circle in the xy-plane
            solid_torus(b, rng, cx, cy, 0.0, 0, per_torus, 0);
            // red torus: core circle in the xz-plane, offset so the cores link
            solid_torus(b, rng, cx + kTorusR, cy, 0.0, 1, per_torus, 1);
        }
    return b.finish(BettiVector{9, 9, 0}, BettiVector{9, 9, 0}, spec.jitter, spec.seed);
}

LabeledPointCloud gen_d3(const DatasetSpec& spec) {
    const std::size_t per_class = spec.n_train / 2;
    const std::size_t per_unit_a = std::max<std::size_t>(per_class / 9, 4);
    const std::size_t per_unit_b = std::max<std::size_t>(per_class / 9, 8);
    // the ball must keep more points than any workable k after subsampling,
    // or its points' neighbor lists reach the shell and merge the components
    const std::size_t per_ball = std::max<std::size_t>(per_unit_b / 6, 2);
    const std::size_t per_shell = per_unit_b - per_ball;

    Builder b;
    b.d = 3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double cx = kUnitSpacing * (i - 1), cy = kUnitSpacing * (j - 1);
            fibonacci_sphere(b, cx, cy, 0.0, kD3Green, per_unit_a, 0);
            fibonacci_sphere(b, cx, cy, 0.0, kD3Outer, per_shell, 1);
            // red ball: 3-D grid restricted to the ball
            const double vol = 4.0 / 3.0 * kPi * kD3Ball * kD3Ball * kD3Ball;
            const double h = std::cbrt(vol / static_cast<double>(per_ball));
            if (h > kD3Ball) throw GenerationError("gen_d3: grid too coarse for balls");
            std::size_t count = 0;
            for (double x = -kD3Ball; x <= kD3Ball + 1e-12; x += h)
                for (double y = -kD3Ball; y <= kD3Ball + 1e-12; y += h)
                    for (double z = -kD3Ball; z <= kD3Ball + 1e-12; z += h)
                        if (x * x + y * y + z * z <= kD3Ball * kD3Ball) {
                            b.add3(cx + x, cy + y, z, 1);
                            ++count;
                        }
            if (count < 2) throw GenerationError("gen_d3: ball underpopulated");
        }
    return b.finish(BettiVector{9, 0, 9}, BettiVector{18, 0, 9}, spec.jitter, spec.seed);
}

LabeledPointCloud generate(const DatasetSpec& spec) {
    switch (spec.family) {
        case Family::D1: return gen_d1(spec);
        case Family::D2: return gen_d2(spec);
        case Family::D3: return gen_d3(spec);
        case Family::Csv: break;
    }
    throw ParamError("generate: CSV family has no generator");
}

LabeledPointCloud sample_known_manifold(ManifoldKind kind, std::size_t n,
                                        std::uint64_t seed) {
    Builder b;
    b.d = 3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BettiVector truth;
    switch (kind) {
        case ManifoldKind::Sphere:
            fibonacci_sphere(b, 0, 0, 0, 1.0, n, 0);
            truth = {1, 0, 1};
            break;
        case ManifoldKind::SolidTorus:
            solid_torus(b, rng, 0, 0, 0, 0, n, 0);
            truth = {1, 1, 0};
            break;
        case ManifoldKind::TorusSurface: {
            // regular theta-phi grid, aspect matched to the two radii so
            // the cells are close to square
            const double tube = 0.375;
            const std::size_t n_phi = std::max<std::size_t>(
                6, static_cast<std::size_t>(
                       std::lround(std::sqrt(static_cast<double>(n) * tube / kTorusR))));
            const std::size_t n_theta = std::max<std::size_t>(6, n / n_phi);
            for (std::size_t i = 0; i < n_theta; ++i)
                for (std::size_t j = 0; j < n_phi; ++j) {
                    const double theta = 2.0 * kPi * static_cast<double>(i) /
                                         static_cast<double>(n_theta);
                    const double phi = 2.0 * kPi * static_cast<double>(j) /
                                       static_cast<double>(n_phi);
                    const double ring = kTorusR + tube * std::cos(phi);
                    b.add3(ring * std::cos(theta), ring * std::sin(theta),
                           tube * std::sin(phi), 0);
                }
            truth = {1, 2, 1};
            break;
        }
    }
    return b.finish(truth, std::nullopt, 0.0, seed);
}

double min_interclass_distance(const LabeledPointCloud& data) {
    const auto a = data.class_indices(0);
    const auto bb = data.class_indices(1);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : a)
        for (std::size_t j : bb)
            best = std::min(best, squared_distance(data.cloud.point(i), data.cloud.point(j)));
    return std::sqrt(best);
}

std::vector<std::size_t> stratified_subsample(const LabeledPointCloud& data,
                                              std::size_t target, std::uint64_t seed) {
    const std::size_t n = data.cloud.n;
    if (target > n) throw ParamError("stratified_subsample: target exceeds cloud size");
    std::vector<std::size_t> chosen;
    for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
        auto idx = data.class_indices(label);
        if (idx.empty()) continue;
        const std::size_t quota = std::min(
            idx.size(),
            static_cast<std::size_t>(std::llround(static_cast<double>(target) *
                                                  static_cast<double>(idx.size()) /
                                                  static_cast<double>(n))));
        std::mt19937_64 rng(seed ^ (0xabcd1234ull + label));
        std::shuffle(idx.begin(), idx.end(), rng);
        chosen.insert(chosen.end(), idx.begin(), idx.begin() + quota);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

LabeledPointCloud load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv: cannot open " + path);

    LabeledPointCloud out;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        if (cells.size() < 2)
            throw ParseError("load_csv: line " + std::to_string(lineno) + ": need >= 2 fields");

        std::vector<double> coords(cells.size() - 1);
        bool numeric = true;
        for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
            try {
                std::size_t used = 0;
                coords[i] = std::stod(cells[i], &used);
                if (used != cells[i].size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (!numeric) {
            if (first_data_row) continue;  // header row
            throw ParseError("load_csv: line " + std::to_string(lineno) +
                             ": non-numeric coordinate");
        }
        const std::string& tok = cells.back();
        std::uint8_t label;
        if (tok == "a" || tok == "0") label = 0;
        else if (tok == "b" || tok == "1") label = 1;
        else
            throw ParseError("load_csv: line " + std::to_string(lineno) +
                             ": unknown label '" + tok + "'");

        if (first_data_row) {
            out.cloud.d = coords.size();
            first_data_row = false;
        } else if (coords.size() != out.cloud.d) {
            throw ParseError("load_csv: line " + std::to_string(lineno) + ": ragged row");
        }
        out.cloud.coords.insert(out.cloud.coords.end(), coords.begin(), coords.end());
        out.labels.push_back(label);
    }
    out.cloud.n = out.labels.size();
    if (out.cloud.n == 0) throw ParseError("load_csv: no data rows in " + path);
    return out;
}

void save_csv(const LabeledPointCloud& data, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw IoError("save_csv: cannot open " + path);
    char buf[64];
    for (std::size_t i = 0; i < data.cloud.n; ++i) {
        const auto p = data.cloud.point(i);
        for (double c : p) {
            std::snprintf(buf, sizeof buf, "%.17g,", c);
            outf << buf;
        }
        outf << (data.labels[i] == 0 ? 'a' : 'b') << '\n';
    }
    if (!outf) throw IoError("save_csv: write failure on " + path);
}

}  // namespace topo
