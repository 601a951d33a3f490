#include "topotrace/homology.hpp"

#include <algorithm>
#include <numeric>

#include "topotrace/errors.hpp"

namespace topo {

namespace {

void require_closed(const SimplicialComplex& complex) {
    if (auto violation = complex.validate()) {
        throw ValidationError("complex is not face-closed at simplex dim=" +
                              std::to_string(violation->simplex.dimension()));
    }
}

// Row indices of the faces of the k-simplex at `idx`, sorted ascending.
std::vector<std::uint32_t> face_column(const SimplicialComplex& complex, int k,
                                       std::size_t idx) {
    std::vector<std::uint32_t> col;
    col.reserve(k + 1);
    const auto verts = complex.simplex(k, idx);
    std::vector<VertexId> face(k);
    for (int drop = 0; drop <= k; ++drop) {
        int w = 0;
        for (int j = 0; j <= k; ++j)
            if (j != drop) face[w++] = verts[j];
        col.push_back(static_cast<std::uint32_t>(*complex.index_of(k - 1, face)));
    }
    std::sort(col.begin(), col.end());
    return col;
}

}  // namespace

F2Matrix boundary_matrix(const SimplicialComplex& complex, int k) {
    if (k < 0) throw ParamError("boundary dimension must be non-negative");
    require_closed(complex);
    if (k == 0) return F2Matrix(0, complex.count(0));
    if (k > complex.dimension()) return F2Matrix(complex.count(k - 1), 0);

    F2Matrix m(complex.count(k - 1), complex.count(k));
    const std::size_t mk = complex.count(k);
    for (std::size_t col = 0; col < mk; ++col)
        for (std::uint32_t row : face_column(complex, k, col)) m.set(row, col, true);
    return m;
}

std::size_t boundary_rank(const SimplicialComplex& complex, int k) {
    if (k <= 0 || k > complex.dimension()) return 0;
    SparseF2Rank reducer;
    const std::size_t mk = complex.count(k);
    for (std::size_t col = 0; col < mk; ++col)
        reducer.add_column(face_column(complex, k, col));
    return reducer.rank();
}

BettiVector betti_numbers(const SimplicialComplex& complex, int dmax) {
    if (dmax < 0) throw ParamError("dmax must be non-negative");
    require_closed(complex);

    BettiVector betti(dmax + 1, 0);
    std::size_t rank_k = 0;  // rank of d_0 = 0
    for (int k = 0; k <= dmax; ++k) {
        const std::size_t rank_next = boundary_rank(complex, k + 1);
        betti[k] = static_cast<long>(complex.count(k)) - static_cast<long>(rank_k) -
                   static_cast<long>(rank_next);
        rank_k = rank_next;
    }
    return betti;
}

long topological_complexity(const BettiVector& betti) {
    return std::accumulate(betti.begin(), betti.end(), 0L);
}

}  // namespace topo
