#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace topo {

/// n points in R^d, row-major.
struct PointCloud {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> coords;  // n * d

    PointCloud() = default;
    PointCloud(std::size_t n_, std::size_t d_) : n(n_), d(d_), coords(n_ * d_, 0.0) {}

    std::span<const double> point(std::size_t i) const { return {coords.data() + i * d, d}; }
    std::span<double> point(std::size_t i) { return {coords.data() + i * d, d}; }

    /// Keeps only the rows in `indices`, in the given order.
    PointCloud select(const std::vector<std::size_t>& indices) const;

    bool operator==(const PointCloud& o) const = default;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Undirected graph from the union-symmetrized k-NN relation: edge (i,j)
/// present iff j is among the k Euclidean-nearest neighbors of i or vice
/// versa. Ties broken by lower vertex index. No self-loops.
struct NeighborGraph {
    std::size_t n = 0;
    int k = 0;
    std::vector<std::vector<std::int32_t>> adj;  // sorted ascending per vertex

    std::size_t edge_count() const;
};

/// Throws ParamError unless 1 <= k < n.
NeighborGraph knn_graph(const PointCloud& cloud, int k);

/// All-pairs hop counts on an unweighted graph; every edge has length one.
struct GeodesicDistances {
    static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

    std::size_t n = 0;
    std::vector<std::uint32_t> hops;  // n * n, symmetric, zero diagonal

    std::uint32_t operator()(std::size_t i, std::size_t j) const { return hops[i * n + j]; }

    /// Largest finite entry (0 for a single vertex).
    std::uint32_t max_finite() const;
};

/// BFS from every vertex.
GeodesicDistances geodesic_distances(const NeighborGraph& graph);

/// Pairwise Euclidean distances; debug metric for ambient-space complexes.
struct PairwiseDistances {
    std::size_t n = 0;
    std::vector<double> dist;  // n * n

    double operator()(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
};

PairwiseDistances euclidean_distances(const PointCloud& cloud);

/// Neighbor count and Vietoris-Rips scale fixed for a whole experiment.
struct ScaleParams {
    int k = 1;
    double eps = 0.0;
};

}  // namespace topo
