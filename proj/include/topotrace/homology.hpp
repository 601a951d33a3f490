#pragma once

#include <vector>

#include "topotrace/f2.hpp"
#include "topotrace/simplicial.hpp"

namespace topo {

/// (beta_0, beta_1, ..., beta_dmax)
using BettiVector = std::vector<long>;

/// Matrix of the boundary operator from k-chains to (k-1)-chains, in the
/// complex's lexicographic bases: shape m_{k-1} x m_k. For k = 0 the result
/// is the 0 x m_0 zero map; for k above the complex dimension the result is
/// m_{k-1} x 0. Throws ValidationError if the complex is not face-closed.
F2Matrix boundary_matrix(const SimplicialComplex& complex, int k);

/// beta_k = (m_k - rank d_k) - rank d_{k+1} for k = 0..dmax, over F2.
/// Ranks are computed by streaming sparse column reduction so large complexes
/// never materialize a dense boundary matrix. Throws ValidationError if the
/// complex is not face-closed.
BettiVector betti_numbers(const SimplicialComplex& complex, int dmax);

/// omega: sum of Betti numbers.
long topological_complexity(const BettiVector& betti);

/// Rank of the boundary operator d_k over F2 without building the dense
/// matrix; complex must be face-closed (not rechecked here).
std::size_t boundary_rank(const SimplicialComplex& complex, int k);

}  // namespace topo
