#include "topotrace/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "topotrace/errors.hpp"

namespace topo {

void FilteredComplex::push(double birth, std::span<const VertexId> verts) {
    births_.push_back(birth);
    dims_.push_back(static_cast<int>(verts.size()) - 1);
    offsets_.push_back(verts_.size());
    verts_.insert(verts_.end(), verts.begin(), verts.end());
}

namespace {

std::uint64_t hash_verts(std::span<const VertexId> verts) {
    std::uint64_t h = 1469598103934665603ull;
    for (VertexId v : verts) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

// position lookup keyed on (dim, vertex list)
class SimplexIndex {
public:
    explicit SimplexIndex(const FilteredComplex& fc) : fc_(fc) {
        map_.reserve(fc.size() * 2);
        for (std::size_t i = 0; i < fc.size(); ++i)
            map_.emplace(hash_verts(fc.vertices(i)) * 31 + static_cast<std::uint64_t>(fc.dim(i)),
                         i);
    }

    std::optional<std::size_t> find(int k, std::span<const VertexId> verts) const {
        auto [lo, hi] = map_.equal_range(hash_verts(verts) * 31 + static_cast<std::uint64_t>(k));
        for (auto it = lo; it != hi; ++it) {
            const std::size_t i = it->second;
            if (fc_.dim(i) == k && std::ranges::equal(fc_.vertices(i), verts)) return i;
        }
        return std::nullopt;
    }

private:
    const FilteredComplex& fc_;
    std::unordered_multimap<std::uint64_t, std::size_t> map_;
};

constexpr std::uint16_t kNeverBorn = 0xffff;

// Enumerates cliques of the ever-born edge graph, recording for each
// simplex the grid index at which its last pairwise edge appears.
class FiltrationBuilder {
public:
    FiltrationBuilder(std::size_t n, std::vector<std::uint16_t> edge_grid,
                      const std::vector<double>& scales, int top_dim, std::size_t budget)
        : n_(n), edge_grid_(std::move(edge_grid)), scales_(scales), top_dim_(top_dim),
          budget_(budget), adj_(n) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (edge_grid_[i * n_ + j] != kNeverBorn) adj_.add_edge(i, j);
    }

    FilteredComplex run() {
        std::vector<std::uint64_t> cand(adj_.words);
        std::vector<VertexId> simplex;
        for (std::size_t v = 0; v < n_; ++v) {
            simplex.assign(1, static_cast<VertexId>(v));
            emit(simplex, 0);
            if (top_dim_ >= 1) {
                mask_above(adj_.row(v), v, cand.data());
                expand(simplex, 0, cand.data());
            }
        }
        return assemble();
    }

private:
    void mask_above(const std::uint64_t* src, std::size_t v, std::uint64_t* dst) const {
        std::copy(src, src + adj_.words, dst);
        const std::size_t word = (v + 1) / 64, bit = (v + 1) % 64;
        for (std::size_t w = 0; w < word && w < adj_.words; ++w) dst[w] = 0;
        if (word < adj_.words) dst[word] &= ~std::uint64_t{0} << bit;
    }

    void expand(std::vector<VertexId>& simplex, std::uint16_t grid_so_far,
                const std::uint64_t* cand) {
        const int depth = static_cast<int>(simplex.size());
        std::vector<std::uint64_t> next;
        for (std::size_t w = 0; w < adj_.words; ++w) {
            std::uint64_t bitsleft = cand[w];
            while (bitsleft) {
                const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsleft));
                bitsleft &= bitsleft - 1;
                std::uint16_t grid = grid_so_far;
                for (VertexId u : simplex)
                    grid = std::max(grid, edge_grid_[static_cast<std::size_t>(u) * n_ + v]);
                simplex.push_back(static_cast<VertexId>(v));
                emit(simplex, grid);
                if (depth < top_dim_) {
                    if (next.empty()) next.resize(adj_.words);
                    const std::uint64_t* nbrs = adj_.row(v);
                    for (std::size_t u = 0; u < adj_.words; ++u) next[u] = cand[u] & nbrs[u];
                    const std::size_t word = (v + 1) / 64, bit = (v + 1) % 64;
                    for (std::size_t u = 0; u < word && u < adj_.words; ++u) next[u] = 0;
                    if (word < adj_.words) next[word] &= ~std::uint64_t{0} << bit;
                    expand(simplex, grid, next.data());
                }
                simplex.pop_back();
            }
        }
    }

    void emit(const std::vector<VertexId>& simplex, std::uint16_t grid) {
        if (entries_.size() + 1 > budget_)
            throw BudgetExceeded("filtration exceeds simplex budget");
        entries_.push_back({grid, static_cast<std::uint32_t>(simplex.size() - 1),
                            static_cast<std::uint32_t>(verts_.size())});
        verts_.insert(verts_.end(), simplex.begin(), simplex.end());
    }

    FilteredComplex assemble() {
        std::vector<std::uint32_t> order(entries_.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            const Entry& ea = entries_[a];
            const Entry& eb = entries_[b];
            if (ea.grid != eb.grid) return ea.grid < eb.grid;
            if (ea.dim != eb.dim) return ea.dim < eb.dim;
            return std::lexicographical_compare(
                verts_.begin() + ea.offset, verts_.begin() + ea.offset + ea.dim + 1,
                verts_.begin() + eb.offset, verts_.begin() + eb.offset + eb.dim + 1);
        });
        FilteredComplex fc;
        fc.set_scale_grid(scales_);
        for (std::uint32_t i : order) {
            const Entry& e = entries_[i];
            fc.push(scales_[e.grid],
                    {verts_.data() + e.offset, static_cast<std::size_t>(e.dim + 1)});
        }
        return fc;
    }

    struct Entry {
        std::uint16_t grid;
        std::uint32_t dim;
        std::uint32_t offset;
    };

    std::size_t n_;
    std::vector<std::uint16_t> edge_grid_;
    std::vector<double> scales_;
    int top_dim_;
    std::size_t budget_;
    AdjacencyBits adj_;
    std::vector<Entry> entries_;
    std::vector<VertexId> verts_;
};

void check_scales(const std::vector<double>& scales) {
    if (scales.empty()) throw ParamError("filtration: scale list must be non-empty");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1])
            throw ParamError("filtration: scales must be strictly increasing");
    if (scales.size() >= kNeverBorn) throw ParamError("filtration: too many scales");
}

// Grid index of the first scale with pair_scale <= 2 * scales[g].
std::uint16_t first_grid(double pair_scale, const std::vector<double>& scales) {
    for (std::size_t g = 0; g < scales.size(); ++g)
        if (pair_scale <= 2.0 * scales[g]) return static_cast<std::uint16_t>(g);
    return kNeverBorn;
}

}  // namespace

std::optional<std::size_t> FilteredComplex::find(int k,
                                                 std::span<const VertexId> verts) const {
    for (std::size_t i = 0; i < size(); ++i)
        if (dims_[i] == k && std::ranges::equal(vertices(i), verts)) return i;
    return std::nullopt;
}

void FilteredComplex::validate() const {
    for (std::size_t i = 1; i < size(); ++i) {
        if (births_[i] < births_[i - 1])
            throw ValidationError("filtration: births out of order at " + std::to_string(i));
        if (births_[i] == births_[i - 1] && dims_[i] < dims_[i - 1])
            throw ValidationError("filtration: dimension order violated at " + std::to_string(i));
    }
    const SimplexIndex index(*this);
    std::vector<VertexId> face;
    for (std::size_t i = 0; i < size(); ++i) {
        const int k = dims_[i];
        if (k == 0) continue;
        const auto verts = vertices(i);
        for (int drop = 0; drop <= k; ++drop) {
            face.clear();
            for (int j = 0; j <= k; ++j)
                if (j != drop) face.push_back(verts[j]);
            const auto idx = index.find(k - 1, face);
            if (!idx || births_[*idx] > births_[i])
                throw ValidationError("filtration: face born after coface at " +
                                      std::to_string(i));
        }
    }
}

FilteredComplex build_filtration(const GeodesicDistances& dist,
                                 const std::vector<double>& scales, int dmax,
                                 std::size_t budget) {
    check_scales(scales);
    if (dmax < 0) throw ParamError("filtration: dmax must be non-negative");
    std::vector<std::uint16_t> edge_grid(dist.n * dist.n, kNeverBorn);
    for (std::size_t i = 0; i < dist.n; ++i)
        for (std::size_t j = i + 1; j < dist.n; ++j) {
            const std::uint32_t h = dist(i, j);
            if (h == GeodesicDistances::kUnreachable) continue;
            const std::uint16_t g = first_grid(static_cast<double>(h), scales);
            edge_grid[i * dist.n + j] = g;
            edge_grid[j * dist.n + i] = g;
        }
    return FiltrationBuilder(dist.n, std::move(edge_grid), scales, dmax + 1, budget).run();
}

FilteredComplex build_filtration_euclidean(const PairwiseDistances& dist,
                                           const std::vector<double>& scales, int dmax,
                                           std::size_t budget) {
    check_scales(scales);
    if (dmax < 0) throw ParamError("filtration: dmax must be non-negative");
    std::vector<std::uint16_t> edge_grid(dist.n * dist.n, kNeverBorn);
    for (std::size_t i = 0; i < dist.n; ++i)
        for (std::size_t j = i + 1; j < dist.n; ++j) {
            const std::uint16_t g = first_grid(dist(i, j), scales);
            edge_grid[i * dist.n + j] = g;
            edge_grid[j * dist.n + i] = g;
        }
    return FiltrationBuilder(dist.n, std::move(edge_grid), scales, dmax + 1, budget).run();
}

Barcode reduce(const FilteredComplex& filtration) {
    filtration.validate();
    const std::size_t m = filtration.size();
    const SimplexIndex index(filtration);

    std::vector<std::int64_t> pivot_of_row(m, -1);
    std::unordered_map<std::size_t, std::vector<std::uint32_t>> pivot_cols;
    std::vector<bool> paired(m, false);

    Barcode barcode;
    std::vector<VertexId> face;
    std::vector<std::uint32_t> col, merged;
    for (std::size_t j = 0; j < m; ++j) {
        const int k = filtration.dim(j);
        col.clear();
        if (k > 0) {
            const auto verts = filtration.vertices(j);
            for (int drop = 0; drop <= k; ++drop) {
                face.clear();
                for (int t = 0; t <= k; ++t)
                    if (t != drop) face.push_back(verts[t]);
                col.push_back(static_cast<std::uint32_t>(*index.find(k - 1, face)));
            }
            std::sort(col.begin(), col.end());
        }
        while (!col.empty()) {
            const std::uint32_t low = col.back();
            const std::int64_t owner = pivot_of_row[low];
            if (owner < 0) {
                pivot_of_row[low] = static_cast<std::int64_t>(j);
                pivot_cols.emplace(j, col);
                paired[low] = true;
                paired[j] = true;
                barcode.intervals.push_back(
                    {filtration.dim(low), filtration.birth(low), filtration.birth(j)});
                break;
            }
            const auto& other = pivot_cols.at(static_cast<std::size_t>(owner));
            merged.clear();
            std::size_t a = 0, b = 0;
            while (a < col.size() && b < other.size()) {
                if (col[a] < other[b]) merged.push_back(col[a++]);
                else if (other[b] < col[a]) merged.push_back(other[b++]);
                else { ++a; ++b; }
            }
            merged.insert(merged.end(), col.begin() + a, col.end());
            merged.insert(merged.end(), other.begin() + b, other.end());
            col.swap(merged);
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        if (!paired[i])
            barcode.intervals.push_back({filtration.dim(i), filtration.birth(i), kInfiniteDeath});

    std::sort(barcode.intervals.begin(), barcode.intervals.end(),
              [](const Interval& a, const Interval& b) {
                  if (a.dim != b.dim) return a.dim < b.dim;
                  if (a.birth != b.birth) return a.birth < b.birth;
                  return a.death < b.death;
              });
    return barcode;
}

long Barcode::betti_at(int k, double eps) const {
    long count = 0;
    for (const Interval& iv : intervals)
        if (iv.dim == k && iv.birth <= eps && eps < iv.death) ++count;
    return count;
}

long Barcode::persistent_betti(int k, std::size_t j, std::size_t p,
                               const std::vector<double>& scales) const {
    if (j + p >= scales.size()) throw ParamError("persistent_betti: j + p out of grid");
    long count = 0;
    for (const Interval& iv : intervals)
        if (iv.dim == k && iv.birth <= scales[j] && iv.death > scales[j + p]) ++count;
    return count;
}

std::vector<Interval> Barcode::positive_length() const {
    std::vector<Interval> out;
    for (const Interval& iv : intervals)
        if (iv.death > iv.birth) out.push_back(iv);
    return out;
}

std::string Barcode::to_csv(bool include_zero_length) const {
    std::string out = "dim,birth,death\n";
    char buf[96];
    for (const Interval& iv : intervals) {
        if (!include_zero_length && iv.death <= iv.birth) continue;
        if (iv.death == kInfiniteDeath)
            std::snprintf(buf, sizeof buf, "%d,%.17g,inf\n", iv.dim, iv.birth);
        else
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", iv.dim, iv.birth, iv.death);
        out += buf;
    }
    return out;
}

std::vector<double> half_integer_grid(double eps_max) {
    if (eps_max < 0.0) throw ParamError("half_integer_grid: eps_max must be >= 0");
    std::vector<double> scales;
    for (double e = 0.0; e <= eps_max + 1e-9; e += 0.5) scales.push_back(e);
    return scales;
}

}  // namespace topo
