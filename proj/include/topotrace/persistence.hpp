#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "topotrace/geometry.hpp"
#include "topotrace/rips.hpp"
#include "topotrace/simplicial.hpp"

namespace topo {

constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

/// Simplices with birth times, sorted by (birth, dimension, lexicographic
/// vertices): a total order refining the filtration, so faces appear no
/// later than cofaces.
class FilteredComplex {
public:
    std::size_t size() const { return births_.size(); }
    double birth(std::size_t i) const { return births_[i]; }
    int dim(std::size_t i) const { return dims_[i]; }
    std::span<const VertexId> vertices(std::size_t i) const {
        return {verts_.data() + offsets_[i], static_cast<std::size_t>(dims_[i] + 1)};
    }
    const std::vector<double>& scale_grid() const { return scales_; }

    /// Appends one simplex; the builder must respect the sort order, which
    /// validate() rechecks.
    void push(double birth, std::span<const VertexId> verts);
    void set_scale_grid(std::vector<double> scales) { scales_ = std::move(scales); }

    /// Checks faces-before-cofaces and the (birth, dim, lex) sort order.
    /// Throws ValidationError on violation.
    void validate() const;

    /// Index of a simplex by dimension and vertex list, if present.
    std::optional<std::size_t> find(int k, std::span<const VertexId> verts) const;

private:
    std::vector<double> births_;
    std::vector<int> dims_;
    std::vector<std::size_t> offsets_;
    std::vector<VertexId> verts_;
    std::vector<double> scales_;
};

/// K_j = VR(X, eps_j): every simplex carries the smallest grid scale at
/// which all its pairwise geodesic distances are <= 2*eps_j; simplices never
/// born within the grid are omitted. Scales must be strictly increasing and
/// non-empty (ParamError otherwise).
FilteredComplex build_filtration(const GeodesicDistances& dist,
                                 const std::vector<double>& scales, int dmax,
                                 std::size_t budget = kDefaultSimplexBudget);

/// Same over raw Euclidean distances (debug metric).
FilteredComplex build_filtration_euclidean(const PairwiseDistances& dist,
                                           const std::vector<double>& scales, int dmax,
                                           std::size_t budget = kDefaultSimplexBudget);

struct Interval {
    int dim = 0;
    double birth = 0.0;
    double death = kInfiniteDeath;

    bool operator==(const Interval& o) const = default;
};

/// Multiset of (dimension, birth, death) intervals; half-open convention
/// [birth, death). Zero-length intervals are retained in raw form and
/// filtered on query.
struct Barcode {
    std::vector<Interval> intervals;  // sorted by (dim, birth, death)

    /// Number of dimension-k intervals containing eps under [birth, death).
    long betti_at(int k, double eps) const;

    /// p-persistent Betti number on the filtration grid: intervals with
    /// birth <= scales[j] and death > scales[j + p].
    long persistent_betti(int k, std::size_t j, std::size_t p,
                          const std::vector<double>& scales) const;

    std::vector<Interval> positive_length() const;

    /// CSV with header dim,birth,death (death = inf for unbounded),
    /// deterministic row order.
    std::string to_csv(bool include_zero_length = false) const;
};

/// Standard persistence algorithm: total boundary matrix in filtration
/// order, columns reduced left to right by XOR until lowest-one rows are
/// unique. Throws ValidationError on an invalid filtration.
Barcode reduce(const FilteredComplex& filtration);

/// Half-integer grid {0, 0.5, 1.0, ..., eps_max}: the geodesic metric is
/// integer-valued, so the filtration only changes at half-integers.
std::vector<double> half_integer_grid(double eps_max);

}  // namespace topo
