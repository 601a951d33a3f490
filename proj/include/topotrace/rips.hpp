#pragma once

#include <cstdint>
#include <vector>

#include "topotrace/geometry.hpp"
#include "topotrace/simplicial.hpp"

namespace topo {

constexpr std::size_t kDefaultSimplexBudget = 40'000'000;

/// Clique complex of the threshold graph { (i,j) : delta(i,j) <= 2*eps } on
/// the graph-geodesic metric, truncated at dimension dmax+1. Unreachable
/// pairs are never joined. Throws BudgetExceeded if the complex would grow
/// past `budget` simplices.
SimplicialComplex vietoris_rips(const GeodesicDistances& dist, double eps, int dmax,
                                std::size_t budget = kDefaultSimplexBudget);

/// Same construction on raw Euclidean distances (debug metric).
SimplicialComplex vietoris_rips_euclidean(const PairwiseDistances& dist, double eps,
                                          int dmax,
                                          std::size_t budget = kDefaultSimplexBudget);

/// Number of connected components of the threshold graph at scale eps.
/// Equals beta_0 of the Vietoris-Rips complex at that scale.
long threshold_components(const GeodesicDistances& dist, double eps);

/// Symmetric adjacency as n bitset rows of n bits; shared by the clique
/// expansion and the filtration builder.
struct AdjacencyBits {
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    explicit AdjacencyBits(std::size_t n_)
        : n(n_), words((n_ + 63) / 64), bits(n_ * words, 0) {}

    void add_edge(std::size_t i, std::size_t j) {
        bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
        bits[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
    }
    bool test(std::size_t i, std::size_t j) const {
        return (bits[i * words + j / 64] >> (j % 64)) & 1u;
    }
    const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
};

/// Clique complex of an explicit adjacency, with simplices of dimension up
/// to `top_dim`. Per dimension the output is in lexicographic order.
SimplicialComplex clique_complex(const AdjacencyBits& adj, int top_dim,
                                 std::size_t budget = kDefaultSimplexBudget);

/// Threshold adjacency delta <= 2*eps for the geodesic metric.
AdjacencyBits threshold_adjacency(const GeodesicDistances& dist, double eps);

}  // namespace topo
