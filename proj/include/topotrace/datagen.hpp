#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topotrace/geometry.hpp"
#include "topotrace/homology.hpp"

namespace topo {

enum class Family { D1, D2, D3, Csv };

struct DatasetSpec {
    Family family = Family::D1;
    std::size_t n_train = 1950;     // generated cloud size (both classes)
    std::size_t n_homology = 650;   // subsample size used for homology
    std::uint64_t seed = 1;
    double jitter = 0.0;  // optional Gaussian jitter; zero = clean samples
};

/// Points in R^d with binary class labels (0 = a, 1 = b) and, for synthetic
/// families, the known per-class Betti vectors.
struct LabeledPointCloud {
    PointCloud cloud;
    std::vector<std::uint8_t> labels;
    std::optional<BettiVector> truth_a;
    std::optional<BettiVector> truth_b;

    PointCloud class_cloud(std::uint8_t label) const;
    std::vector<std::size_t> class_indices(std::uint8_t label) const;
};

/// Nine class-a disks sitting in the nine holes of a larger class-b region.
/// truth: a -> (9, 0), b -> (1, 9). 2-D, sampled on per-class grids.
LabeledPointCloud gen_d1(const DatasetSpec& spec);

/// Nine disjoint pairs of interlocked solid tori, one per class.
/// truth: both classes (9, 9, 0). 3-D, sampled uniformly in the solid tori.
LabeledPointCloud gen_d2(const DatasetSpec& spec);

/// Nine units of red sphere enclosing a green sphere enclosing a red ball.
/// truth: a -> (9, 0, 9), b -> (18, 0, 9). 3-D.
LabeledPointCloud gen_d3(const DatasetSpec& spec);

/// Dispatch on spec.family (Csv is not generable; ParamError).
LabeledPointCloud generate(const DatasetSpec& spec);

/// CSV: one point per row `x_1,...,x_d,label`, label in {a,b} or {0,1};
/// optional header row auto-skipped when non-numeric. Parse errors carry
/// the line number.
LabeledPointCloud load_csv(const std::string& path);
void save_csv(const LabeledPointCloud& data, const std::string& path);

enum class ManifoldKind { Sphere, TorusSurface, SolidTorus };

/// Single-class cloud with the manifold's known Betti vector:
/// sphere (1,0,1), torus surface (1,2,1), solid torus (1,1,0).
LabeledPointCloud sample_known_manifold(ManifoldKind kind, std::size_t n,
                                        std::uint64_t seed);

/// Minimum Euclidean distance between the two classes.
double min_interclass_distance(const LabeledPointCloud& data);

/// Deterministic stratified subsample: per class, a uniform draw without
/// replacement; class shares proportional to class sizes. Returns indices
/// into `data.cloud` in ascending order.
std::vector<std::size_t> stratified_subsample(const LabeledPointCloud& data,
                                              std::size_t target, std::uint64_t seed);

}  // namespace topo
