#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace topo {

using VertexId = std::int32_t;

/// Abstract simplex: a strictly increasing list of vertex indices.
/// dimension = |vertices| - 1.
struct Simplex {
    std::vector<VertexId> vertices;

    Simplex() = default;
    /// Normalizes to canonical form (sorted). Throws ParamError on
    /// duplicates, negatives, or an empty vertex list.
    explicit Simplex(std::vector<VertexId> verts);
    Simplex(std::initializer_list<VertexId> verts)
        : Simplex(std::vector<VertexId>(verts)) {}

    int dimension() const { return static_cast<int>(vertices.size()) - 1; }
    bool operator==(const Simplex& o) const = default;
    auto operator<=>(const Simplex& o) const = default;
};

/// Face-closed set of simplices grouped by dimension. Within each dimension
/// simplices are kept sorted lexicographically on their vertex lists; this
/// fixed order is the basis order used by the boundary matrices.
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /// Builds from an arbitrary simplex list, deduplicating. Does not add
    /// missing faces; validate() will report them.
    static SimplicialComplex from_simplices(const std::vector<Simplex>& simplices);

    /// Builds the face closure of the given simplices.
    static SimplicialComplex closure_of(const std::vector<Simplex>& simplices);

    /// Highest dimension with at least one simplex; -1 for the empty complex.
    int dimension() const { return static_cast<int>(flat_.size()) - 1; }

    /// m_k: number of k-simplices.
    std::size_t count(int k) const {
        return (k >= 0 && k <= dimension()) ? flat_[k].size() / (k + 1) : 0;
    }

    /// |K| = sum of m_k.
    std::size_t size() const;

    /// Vertices of the idx-th k-simplex in lexicographic basis order.
    std::span<const VertexId> simplex(int k, std::size_t idx) const {
        return {flat_[k].data() + idx * (k + 1), static_cast<std::size_t>(k + 1)};
    }

    /// Lexicographic basis index of a k-simplex, if present.
    std::optional<std::size_t> index_of(int k, std::span<const VertexId> verts) const;

    struct Violation {
        Simplex simplex;
        std::string reason;
    };

    /// ok (nullopt) iff face-closed; otherwise the first offending simplex.
    /// Duplicates cannot occur by construction.
    std::optional<Violation> validate() const;

    /// Debug dump: one simplex per line, space-separated vertex indices.
    std::string dump() const;

    /// Flat storage for dimension k: count(k) blocks of (k+1) vertex ids.
    const std::vector<VertexId>& flat(int k) const { return flat_[k]; }

    /// Appends a dimension-k block that is already sorted lexicographically
    /// and duplicate-free. Used by the Vietoris-Rips builder.
    void adopt_dimension(int k, std::vector<VertexId> flat_simplices);

    bool operator==(const SimplicialComplex& o) const = default;

private:
    std::vector<std::vector<VertexId>> flat_;  // flat_[k] = k-simplices
};

}  // namespace topo
