#include "topotrace/rips.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topotrace/errors.hpp"

namespace topo {

namespace {

// Disjoint-set on n vertices.
struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::int32_t a, std::int32_t b) { parent[find(a)] = find(b); }
};

class CliqueBuilder {
public:
    CliqueBuilder(const AdjacencyBits& adj, int top_dim, std::size_t budget)
        : adj_(adj), top_dim_(top_dim), budget_(budget), by_dim_(top_dim + 1),
          scratch_(top_dim + 1, std::vector<std::uint64_t>(adj.words)) {}

    SimplicialComplex run() {
        std::vector<VertexId> simplex;
        for (std::size_t v = 0; v < adj_.n; ++v) {
            simplex.assign(1, static_cast<VertexId>(v));
            emit(simplex);
            if (top_dim_ >= 1) {
                higher_neighbors(adj_.row(v), v, scratch_[0].data());
                expand(simplex, scratch_[0].data());
            }
        }
        SimplicialComplex out;
        for (int k = 0; k <= top_dim_; ++k) {
            if (k > 0 && by_dim_[k].empty()) break;  // no trailing empty dimensions
            out.adopt_dimension(k, std::move(by_dim_[k]));
        }
        return out;
    }

private:
    // cand := nbrs & { indices > v }
    void higher_neighbors(const std::uint64_t* nbrs, std::size_t v, std::uint64_t* cand) const {
        std::copy(nbrs, nbrs + adj_.words, cand);
        const std::size_t word = (v + 1) / 64, bit = (v + 1) % 64;
        for (std::size_t w = 0; w < word && w < adj_.words; ++w) cand[w] = 0;
        if (word < adj_.words) cand[word] &= ~std::uint64_t{0} << bit;
    }

    void expand(std::vector<VertexId>& simplex, const std::uint64_t* cand) {
        const int depth = static_cast<int>(simplex.size());  // simplex has dim depth-1
        for (std::size_t w = 0; w < adj_.words; ++w) {
            std::uint64_t bitsleft = cand[w];
            while (bitsleft) {
                const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsleft));
                bitsleft &= bitsleft - 1;
                simplex.push_back(static_cast<VertexId>(v));
                emit(simplex);
                if (depth < top_dim_) {
                    std::uint64_t* next = scratch_[depth].data();
                    const std::uint64_t* nbrs = adj_.row(v);
                    for (std::size_t u = 0; u < adj_.words; ++u) next[u] = cand[u] & nbrs[u];
                    // keep only indices above v
                    const std::size_t word = (v + 1) / 64, bit = (v + 1) % 64;
                    for (std::size_t u = 0; u < word && u < adj_.words; ++u) next[u] = 0;
                    if (word < adj_.words) next[word] &= ~std::uint64_t{0} << bit;
                    expand(simplex, next);
                }
                simplex.pop_back();
            }
        }
    }

    void emit(const std::vector<VertexId>& simplex) {
        if (++total_ > budget_)
            throw BudgetExceeded("clique complex exceeds simplex budget of " +
                                 std::to_string(budget_));
        auto& flat = by_dim_[simplex.size() - 1];
        flat.insert(flat.end(), simplex.begin(), simplex.end());
    }

    const AdjacencyBits& adj_;
    int top_dim_;
    std::size_t budget_;
    std::size_t total_ = 0;
    std::vector<std::vector<VertexId>> by_dim_;
    std::vector<std::vector<std::uint64_t>> scratch_;
};

}  // namespace

SimplicialComplex clique_complex(const AdjacencyBits& adj, int top_dim, std::size_t budget) {
    return CliqueBuilder(adj, top_dim, budget).run();
}

AdjacencyBits threshold_adjacency(const GeodesicDistances& dist, double eps) {
    AdjacencyBits adj(dist.n);
    const double limit = 2.0 * eps;
    for (std::size_t i = 0; i < dist.n; ++i)
        for (std::size_t j = i + 1; j < dist.n; ++j) {
            const std::uint32_t h = dist(i, j);
            if (h != GeodesicDistances::kUnreachable && static_cast<double>(h) <= limit)
                adj.add_edge(i, j);
        }
    return adj;
}

SimplicialComplex vietoris_rips(const GeodesicDistances& dist, double eps, int dmax,
                                std::size_t budget) {
    if (eps < 0.0) throw ParamError("vietoris_rips: eps must be non-negative");
    if (dmax < 0) throw ParamError("vietoris_rips: dmax must be non-negative");
    return clique_complex(threshold_adjacency(dist, eps), dmax + 1, budget);
}

SimplicialComplex vietoris_rips_euclidean(const PairwiseDistances& dist, double eps,
                                          int dmax, std::size_t budget) {
    if (eps < 0.0) throw ParamError("vietoris_rips: eps must be non-negative");
    if (dmax < 0) throw ParamError("vietoris_rips: dmax must be non-negative");
    AdjacencyBits adj(dist.n);
    const double limit = 2.0 * eps;
    for (std::size_t i = 0; i < dist.n; ++i)
        for (std::size_t j = i + 1; j < dist.n; ++j)
            if (dist(i, j) <= limit) adj.add_edge(i, j);
    return clique_complex(adj, dmax + 1, budget);
}

long threshold_components(const GeodesicDistances& dist, double eps) {
    UnionFind uf(dist.n);
    const double limit = 2.0 * eps;
    for (std::size_t i = 0; i < dist.n; ++i)
        for (std::size_t j = i + 1; j < dist.n; ++j) {
            const std::uint32_t h = dist(i, j);
            if (h != GeodesicDistances::kUnreachable && static_cast<double>(h) <= limit)
                uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
        }
    long components = 0;
    for (std::size_t i = 0; i < dist.n; ++i)
        if (uf.find(static_cast<std::int32_t>(i)) == static_cast<std::int32_t>(i))
            ++components;
    return components;
}

}  // namespace topo
