#include "topotrace/simplicial.hpp"

#include <algorithm>
#include <sstream>

#include "topotrace/errors.hpp"

namespace topo {

Simplex::Simplex(std::vector<VertexId> verts) : vertices(std::move(verts)) {
    if (vertices.empty()) throw ParamError("simplex needs at least one vertex");
    std::sort(vertices.begin(), vertices.end());
    if (vertices.front() < 0) throw ParamError("negative vertex index");
    if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
        throw ParamError("duplicate vertex in simplex");
}

namespace {

// Compares two flat (k+1)-blocks lexicographically.
struct BlockLess {
    const VertexId* base;
    int width;
    bool operator()(std::size_t a, std::size_t b) const {
        return std::lexicographical_compare(base + a * width, base + (a + 1) * width,
                                            base + b * width, base + (b + 1) * width);
    }
};

}  // namespace

SimplicialComplex SimplicialComplex::from_simplices(const std::vector<Simplex>& simplices) {
    int dmax = -1;
    for (const Simplex& s : simplices) dmax = std::max(dmax, s.dimension());

    SimplicialComplex out;
    out.flat_.resize(dmax + 1);
    std::vector<std::vector<Simplex>> by_dim(dmax + 1);
    for (const Simplex& s : simplices) by_dim[s.dimension()].push_back(s);
    for (int k = 0; k <= dmax; ++k) {
        auto& group = by_dim[k];
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end()), group.end());
        auto& flat = out.flat_[k];
        flat.reserve(group.size() * (k + 1));
        for (const Simplex& s : group)
            flat.insert(flat.end(), s.vertices.begin(), s.vertices.end());
    }
    return out;
}

SimplicialComplex SimplicialComplex::closure_of(const std::vector<Simplex>& simplices) {
    std::vector<Simplex> all;
    for (const Simplex& s : simplices) {
        const int n = static_cast<int>(s.vertices.size());
        // every non-empty subset of the vertex set
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<VertexId> verts;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) verts.push_back(s.vertices[i]);
            all.emplace_back(std::move(verts));
        }
    }
    return from_simplices(all);
}

std::size_t SimplicialComplex::size() const {
    std::size_t total = 0;
    for (int k = 0; k <= dimension(); ++k) total += count(k);
    return total;
}

std::optional<std::size_t> SimplicialComplex::index_of(
    int k, std::span<const VertexId> verts) const {
    if (k < 0 || k > dimension()) return std::nullopt;
    const auto& flat = flat_[k];
    const int width = k + 1;
    const std::size_t n = flat.size() / width;
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const VertexId* p = flat.data() + mid * width;
        if (std::lexicographical_compare(p, p + width, verts.begin(), verts.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < n && std::equal(verts.begin(), verts.end(), flat.data() + lo * width))
        return lo;
    return std::nullopt;
}

std::optional<SimplicialComplex::Violation> SimplicialComplex::validate() const {
    std::vector<VertexId> face;
    for (int k = 1; k <= dimension(); ++k) {
        const std::size_t m = count(k);
        for (std::size_t i = 0; i < m; ++i) {
            const auto verts = simplex(k, i);
            for (int drop = 0; drop <= k; ++drop) {
                face.clear();
                for (int j = 0; j <= k; ++j)
                    if (j != drop) face.push_back(verts[j]);
                if (!index_of(k - 1, face)) {
                    return Violation{Simplex(std::vector<VertexId>(verts.begin(), verts.end())),
                                     "missing face"};
                }
            }
        }
    }
    return std::nullopt;
}

std::string SimplicialComplex::dump() const {
    std::ostringstream os;
    for (int k = 0; k <= dimension(); ++k) {
        const std::size_t m = count(k);
        for (std::size_t i = 0; i < m; ++i) {
            const auto verts = simplex(k, i);
            for (int j = 0; j <= k; ++j) {
                if (j) os << ' ';
                os << verts[j];
            }
            os << '\n';
        }
    }
    return os.str();
}

void SimplicialComplex::adopt_dimension(int k, std::vector<VertexId> flat_simplices) {
    if (static_cast<int>(flat_.size()) <= k) flat_.resize(k + 1);
    flat_[k] = std::move(flat_simplices);
}

}  // namespace topo
