#include "topotrace/f2.hpp"

#include <algorithm>
#include <utility>

namespace topo {

F2Matrix F2Matrix::identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

void F2Matrix::xor_row(std::size_t dst, std::size_t src) {
    std::uint64_t* d = bits_.data() + dst * words_per_row_;
    const std::uint64_t* s = bits_.data() + src * words_per_row_;
    for (std::size_t w = 0; w < words_per_row_; ++w) d[w] ^= s[w];
}

void F2Matrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(bits_.begin() + a * words_per_row_,
                     bits_.begin() + (a + 1) * words_per_row_,
                     bits_.begin() + b * words_per_row_);
}

F2Matrix F2Matrix::multiply(const F2Matrix& rhs) const {
    F2Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            if (!get(i, k)) continue;
            // out.row(i) ^= rhs.row(k)
            std::uint64_t* d = out.bits_.data() + i * out.words_per_row_;
            const std::uint64_t* s = rhs.bits_.data() + k * rhs.words_per_row_;
            for (std::size_t w = 0; w < out.words_per_row_; ++w) d[w] ^= s[w];
        }
    }
    return out;
}

F2Matrix F2Matrix::transposed() const {
    F2Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j)) out.set(j, i, true);
    return out;
}

bool F2Matrix::is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(),
                       [](std::uint64_t w) { return w == 0; });
}

std::size_t rank_f2(F2Matrix m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && !m.get(pivot, col)) ++pivot;
        if (pivot == rows) continue;
        m.swap_rows(rank, pivot);
        for (std::size_t r = 0; r < rows; ++r)
            if (r != rank && m.get(r, col)) m.xor_row(r, rank);
        ++rank;
    }
    return rank;
}

bool SparseF2Rank::add_column(std::vector<std::uint32_t> col) {
    std::vector<std::uint32_t> merged;
    while (!col.empty()) {
        const std::uint32_t low = col.back();
        if (low >= pivot_of_row_.size()) pivot_of_row_.resize(low + 1, -1);
        const std::int64_t owner = pivot_of_row_[low];
        if (owner < 0) {
            pivot_of_row_[low] = static_cast<std::int64_t>(pivot_cols_.size());
            pivot_cols_.push_back(std::move(col));
            ++rank_;
            return true;
        }
        // XOR with the owning column (symmetric difference of sorted lists).
        const std::vector<std::uint32_t>& other = pivot_cols_[static_cast<std::size_t>(owner)];
        merged.clear();
        merged.reserve(col.size() + other.size());
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
    return false;
}

}  // namespace topo
