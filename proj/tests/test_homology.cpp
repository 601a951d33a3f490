#include <random>

#include "doctest.h"
#include "topotrace/errors.hpp"
#include "topotrace/homology.hpp"
#include "topotrace/simplicial.hpp"

using topo::BettiVector;
using topo::Simplex;
using topo::SimplicialComplex;

namespace {

SimplicialComplex random_closed_complex(std::mt19937_64& rng, int n_vertices,
                                        int n_tops, int max_dim) {
    std::vector<Simplex> tops;
    std::uniform_int_distribution<int> vdist(0, n_vertices - 1);
    for (int t = 0; t < n_tops; ++t) {
        std::uniform_int_distribution<int> ddist(0, max_dim);
        int dim = ddist(rng);
        std::vector<topo::VertexId> verts;
        while (static_cast<int>(verts.size()) < dim + 1) {
            int v = vdist(rng);
            if (std::find(verts.begin(), verts.end(), v) == verts.end())
                verts.push_back(v);
        }
        tops.emplace_back(std::move(verts));
    }
    return SimplicialComplex::closure_of(tops);
}

// Betti numbers from dense matrices only; cross-checks the sparse path.
BettiVector betti_dense(const SimplicialComplex& k, int dmax) {
    BettiVector out;
    for (int d = 0; d <= dmax; ++d) {
        long m = static_cast<long>(k.count(d));
        long r_d = static_cast<long>(topo::rank_f2(topo::boundary_matrix(k, d)));
        long r_up = static_cast<long>(topo::rank_f2(topo::boundary_matrix(k, d + 1)));
        out.push_back(m - r_d - r_up);
    }
    return out;
}

}  // namespace

TEST_CASE("boundary of an edge hits both endpoints") {
    auto k = SimplicialComplex::closure_of({Simplex{0, 1}});
    auto d1 = topo::boundary_matrix(k, 1);
    REQUIRE(d1.rows() == 2);
    REQUIRE(d1.cols() == 1);
    CHECK(d1.get(0, 0));
    CHECK(d1.get(1, 0));
}

TEST_CASE("boundary of a triangle is its three edges") {
    auto k = SimplicialComplex::closure_of({Simplex{0, 1, 2}});
    auto d2 = topo::boundary_matrix(k, 2);
    REQUIRE(d2.rows() == 3);
    REQUIRE(d2.cols() == 1);
    for (std::size_t r = 0; r < 3; ++r) CHECK(d2.get(r, 0));
}

TEST_CASE("boundary matrix edge shapes") {
    auto k = SimplicialComplex::closure_of({Simplex{0, 1, 2}});
    auto d0 = topo::boundary_matrix(k, 0);
    CHECK(d0.rows() == 0);
    CHECK(d0.cols() == 3);
    auto d3 = topo::boundary_matrix(k, 3);
    CHECK(d3.rows() == 1);
    CHECK(d3.cols() == 0);
}

TEST_CASE("boundary matrix rejects a non-closed complex") {
    auto k = SimplicialComplex::from_simplices({Simplex{0}, Simplex{0, 1}});
    CHECK_THROWS_AS(topo::boundary_matrix(k, 1), topo::ValidationError);
    CHECK_THROWS_AS(topo::betti_numbers(k, 1), topo::ValidationError);
}

TEST_CASE("betti numbers of hand-checked complexes") {
    // hollow triangle: a circle
    auto circle = SimplicialComplex::closure_of(
        {Simplex{0, 1}, Simplex{1, 2}, Simplex{0, 2}});
    CHECK(topo::betti_numbers(circle, 1) == BettiVector{1, 1});

    // filled triangle: a disk
    auto disk = SimplicialComplex::closure_of({Simplex{0, 1, 2}});
    CHECK(topo::betti_numbers(disk, 2) == BettiVector{1, 0, 0});

    // hollow tetrahedron: a sphere
    std::vector<Simplex> faces;
    for (int skip = 0; skip < 4; ++skip) {
        std::vector<topo::VertexId> verts;
        for (int v = 0; v < 4; ++v)
            if (v != skip) verts.push_back(v);
        faces.emplace_back(std::move(verts));
    }
    auto sphere = SimplicialComplex::closure_of(faces);
    CHECK(topo::betti_numbers(sphere, 2) == BettiVector{1, 0, 1});

    // two disjoint circles and an isolated point
    auto multi = SimplicialComplex::closure_of(
        {Simplex{0, 1}, Simplex{1, 2}, Simplex{0, 2}, Simplex{3, 4}, Simplex{4, 5},
         Simplex{3, 5}, Simplex{6}});
    CHECK(topo::betti_numbers(multi, 1) == BettiVector{3, 2});
}

TEST_CASE("boundary of boundary is zero") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        auto k = random_closed_complex(rng, 8, 4, 4);
        for (int d = 1; d <= k.dimension(); ++d) {
            auto prod = topo::boundary_matrix(k, d).multiply(topo::boundary_matrix(k, d + 1));
            CHECK(prod.is_zero());
        }
    }
}

TEST_CASE("sparse betti path matches the dense path on random complexes") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        auto k = random_closed_complex(rng, 9, 5, 3);
        CHECK(topo::betti_numbers(k, 3) == betti_dense(k, 3));
    }
}

TEST_CASE("euler characteristic equals the alternating betti sum") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto k = random_closed_complex(rng, 8, 5, 3);
        int dmax = k.dimension();
        auto betti = topo::betti_numbers(k, dmax);
        long chi_cells = 0, chi_betti = 0;
        for (int d = 0; d <= dmax; ++d) {
            long sign = (d % 2 == 0) ? 1 : -1;
            chi_cells += sign * static_cast<long>(k.count(d));
            chi_betti += sign * betti[d];
        }
        CHECK(chi_cells == chi_betti);
    }
}

TEST_CASE("betti numbers are invariant under vertex relabeling") {
    std::mt19937_64 rng(11);
    std::vector<Simplex> tops = {Simplex{0, 1, 2}, Simplex{2, 3}, Simplex{3, 4, 5},
                                 Simplex{0, 5}};
    auto base = topo::betti_numbers(SimplicialComplex::closure_of(tops), 2);
    std::vector<topo::VertexId> perm{0, 1, 2, 3, 4, 5};
    for (int t = 0; t < 10; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Simplex> relabeled;
        for (const auto& s : tops) {
            std::vector<topo::VertexId> verts;
            for (auto v : s.vertices) verts.push_back(perm[v]);
            relabeled.emplace_back(std::move(verts));
        }
        CHECK(topo::betti_numbers(SimplicialComplex::closure_of(relabeled), 2) == base);
    }
}

TEST_CASE("topological complexity sums the betti numbers") {
    CHECK(topo::topological_complexity({1, 9}) == 10);
    CHECK(topo::topological_complexity({9, 9, 0}) == 18);
    CHECK(topo::topological_complexity({}) == 0);
}
