#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace topo {

/// Dense matrix over the two-element field, bit-packed row-major.
/// Addition is XOR; scalars are {0,1} with mod-2 arithmetic.
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
          bits_(rows * words_per_row_, 0) {}

    static F2Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (bits_[r * words_per_row_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        std::uint64_t& w = bits_[r * words_per_row_ + c / 64];
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        if (v) w |= mask; else w &= ~mask;
    }

    /// rows[dst] ^= rows[src]
    void xor_row(std::size_t dst, std::size_t src);
    void swap_rows(std::size_t a, std::size_t b);

    F2Matrix multiply(const F2Matrix& rhs) const;
    F2Matrix transposed() const;
    bool is_zero() const;

    bool operator==(const F2Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Rank over F2. Takes its argument by value: elimination is destructive
/// in place on the copy, the caller's matrix is never mutated.
std::size_t rank_f2(F2Matrix m);

/// Incremental rank of a matrix presented column by column, each column a
/// sorted list of row indices with a 1. Keeps only reduced pivot columns,
/// so memory stays proportional to the rank, not the column count.
class SparseF2Rank {
public:
    /// Reduces `col` against the stored pivots. Returns true if the column
    /// was independent (rank increased).
    bool add_column(std::vector<std::uint32_t> col);
    std::size_t rank() const { return rank_; }

private:
    // pivot row -> reduced column owning that pivot (sorted ascending)
    std::vector<std::vector<std::uint32_t>> pivot_cols_;
    std::vector<std::int64_t> pivot_of_row_;
    std::size_t rank_ = 0;
};

}  // namespace topo
