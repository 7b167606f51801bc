#pragma once
// Dense bit-packed GF(2) vectors and matrices.
//
// Storage is row-major, 64 bits per word, with the unused high bits of the
// last word always zero. Callers should only rely on index-level access.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qec/kernels.hpp"

namespace qec::gf2 {

using kernels::Word;

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t length) : length_(length), words_(words_for(length), 0) {}

  static BitVector from_indices(std::size_t length, std::span<const std::size_t> ones);
  static BitVector from_indices(std::size_t length, std::initializer_list<std::size_t> ones) {
    return from_indices(length, std::span<const std::size_t>(ones.begin(), ones.size()));
  }
  /// Bits from a 0/1 string, index 0 first ("101" has bits 0 and 2 set).
  static BitVector from_string(std::string_view bits);
  /// Low `length` bits of `mask`; requires length <= 64.
  static BitVector from_mask(std::size_t length, std::uint64_t mask);

  std::size_t size() const noexcept { return length_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const Word bit = Word{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= Word{1} << (i & 63); }
  bool operator[](std::size_t i) const { return get(i); }

  std::size_t weight() const { return kernels::popcount(words_); }
  bool is_zero() const { return kernels::is_zero(words_); }
  std::vector<std::size_t> support() const;
  /// Requires size() <= 64.
  std::uint64_t to_mask() const;
  std::string to_string() const;

  std::span<Word> words() noexcept { return words_; }
  std::span<const Word> words() const noexcept { return words_; }

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector lhs, const BitVector& rhs) { return lhs ^= rhs; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// Parity of the overlap |a & b|.
  friend bool overlap_parity(const BitVector& a, const BitVector& b);

 private:
  std::size_t length_ = 0;
  std::vector<Word> words_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * stride_, 0) {}

  static BitMatrix identity(std::size_t n);
  /// Dense 0/1 rows; every row must have the same length.
  static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);
  static BitMatrix from_rows(const std::vector<std::vector<int>>& rows);
  static BitMatrix from_row_vectors(std::span<const BitVector> rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * stride_ + (c >> 6)] >> (c & 63)) & 1U;
  }
  void set(std::size_t r, std::size_t c, bool value = true) {
    Word& w = data_[r * stride_ + (c >> 6)];
    const Word bit = Word{1} << (c & 63);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::span<Word> row_words(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
  std::span<const Word> row_words(std::size_t r) const {
    return {data_.data() + r * stride_, stride_};
  }
  BitVector row(std::size_t r) const;
  BitVector column(std::size_t c) const;
  std::size_t row_weight(std::size_t r) const { return kernels::popcount(row_words(r)); }
  std::size_t column_weight(std::size_t c) const;

  void swap_rows(std::size_t a, std::size_t b);
  /// row[dst] ^= row[src]
  void add_row(std::size_t dst, std::size_t src) {
    kernels::xor_into(row_words(dst), row_words(src));
  }

  BitMatrix transpose() const;
  BitMatrix select_columns(std::span<const std::size_t> cols) const;
  bool is_zero() const { return kernels::is_zero(data_); }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> data_;
};

/// M · v over GF(2).
BitVector mat_vec(const BitMatrix& m, const BitVector& v);

/// A · Bᵀ over GF(2); requires a.cols() == b.cols().
BitMatrix multiply_transpose(const BitMatrix& a, const BitMatrix& b);

std::size_t rank(const BitMatrix& m);

struct RowReduction {
  BitMatrix reduced;                    // reduced row-echelon form
  std::vector<std::size_t> pivot_cols;  // strictly increasing
  BitMatrix transform;                  // transform · input == reduced
};

RowReduction row_reduce(const BitMatrix& m);

/// Solves M·e = s with the support of e restricted to `allowed_cols`.
/// Free variables are set to zero after reducing the restricted matrix
/// (columns taken in ascending index order), so the result is deterministic.
/// Returns nullopt when s is not reachable from the allowed columns.
std::optional<BitVector> solve_restricted(const BitMatrix& m, const BitVector& s,
                                          std::span<const std::size_t> allowed_cols);

/// Scans `order` and keeps each column that is linearly independent of the
/// columns kept before it. Stops once rank(M) columns have been kept.
std::vector<std::size_t> independent_columns(const BitMatrix& m,
                                             std::span<const std::size_t> order);

/// True iff v lies in the row space of m.
bool in_row_space(const BitMatrix& m, const BitVector& v);

}  // namespace qec::gf2
