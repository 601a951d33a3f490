#include "topotrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "topotrace/errors.hpp"

namespace topo {

PointCloud PointCloud::select(const std::vector<std::size_t>& indices) const {
    PointCloud out(indices.size(), d);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = point(indices[r]);
        std::copy(src.begin(), src.end(), out.point(r).begin());
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

std::size_t NeighborGraph::edge_count() const {
    std::size_t deg_sum = 0;
    for (const auto& nbrs : adj) deg_sum += nbrs.size();
    return deg_sum / 2;
}

NeighborGraph knn_graph(const PointCloud& cloud, int k) {
    const std::size_t n = cloud.n;
    if (k < 1 || static_cast<std::size_t>(k) >= n)
        throw ParamError("knn_graph: need 1 <= k < n");

    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.adj.assign(n, {});

    std::vector<std::pair<double, std::int32_t>> dists(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = cloud.point(i);
        for (std::size_t j = 0; j < n; ++j)
            dists[j] = {squared_distance(pi, cloud.point(j)), static_cast<std::int32_t>(j)};
        dists[i].first = std::numeric_limits<double>::infinity();  // exclude self
        // (dist, index) comparison breaks ties by lower vertex index
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        std::sort(dists.begin(), dists.begin() + k);
        for (int m = 0; m < k; ++m) {
            const std::int32_t j = dists[m].second;
            g.adj[i].push_back(j);
            g.adj[j].push_back(static_cast<std::int32_t>(i));  // union symmetrization
        }
    }
    for (auto& nbrs : g.adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return g;
}

GeodesicDistances geodesic_distances(const NeighborGraph& graph) {
    const std::size_t n = graph.n;
    GeodesicDistances d;
    d.n = n;
    d.hops.assign(n * n, GeodesicDistances::kUnreachable);

    std::vector<std::int32_t> queue(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::uint32_t* row = d.hops.data() + src * n;
        std::size_t head = 0, tail = 0;
        row[src] = 0;
        queue[tail++] = static_cast<std::int32_t>(src);
        while (head < tail) {
            const std::int32_t u = queue[head++];
            const std::uint32_t du = row[u];
            for (std::int32_t v : graph.adj[u]) {
                if (row[v] == GeodesicDistances::kUnreachable) {
                    row[v] = du + 1;
                    queue[tail++] = v;
                }
            }
        }
    }
    return d;
}

std::uint32_t GeodesicDistances::max_finite() const {
    std::uint32_t best = 0;
    for (std::uint32_t h : hops)
        if (h != kUnreachable) best = std::max(best, h);
    return best;
}

PairwiseDistances euclidean_distances(const PointCloud& cloud) {
    PairwiseDistances out;
    out.n = cloud.n;
    out.dist.assign(cloud.n * cloud.n, 0.0);
    for (std::size_t i = 0; i < cloud.n; ++i)
        for (std::size_t j = i + 1; j < cloud.n; ++j) {
            const double dij = std::sqrt(squared_distance(cloud.point(i), cloud.point(j)));
            out.dist[i * cloud.n + j] = dij;
            out.dist[j * cloud.n + i] = dij;
        }
    return out;
}

}  // namespace topo
