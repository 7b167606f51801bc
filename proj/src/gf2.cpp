#include "qec/gf2.hpp"

#include <algorithm>
#include <bit>

#include "qec/error.hpp"

namespace qec::gf2 {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("gf2", what); }

// In-place Gauss-Jordan elimination over the first `cols` columns of `m`.
// Row operations are mirrored on `transform` when it is non-null.
std::vector<std::size_t> eliminate(BitMatrix& m, std::size_t cols, BitMatrix* transform) {
  std::vector<std::size_t> pivots;
  std::size_t next = 0;
  for (std::size_t c = 0; c < cols && next < m.rows(); ++c) {
    std::size_t pivot = next;
    while (pivot < m.rows() && !m.get(pivot, c)) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != next) {
      m.swap_rows(pivot, next);
      if (transform != nullptr) transform->swap_rows(pivot, next);
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r != next && m.get(r, c)) {
        m.add_row(r, next);
        if (transform != nullptr) transform->add_row(r, next);
      }
    }
    pivots.push_back(c);
    ++next;
  }
  return pivots;
}

}  // namespace

BitVector BitVector::from_indices(std::size_t length, std::span<const std::size_t> ones) {
  BitVector v(length);
  for (std::size_t i : ones) {
    if (i >= length) fail("index " + std::to_string(i) + " out of range");
    v.set(i);
  }
  return v;
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i);
    } else if (bits[i] != '0') {
      fail("bit string may only contain 0 and 1");
    }
  }
  return v;
}

BitVector BitVector::from_mask(std::size_t length, std::uint64_t mask) {
  if (length > 64) fail("from_mask needs length <= 64");
  BitVector v(length);
  if (length > 0) {
    v.words_[0] = length == 64 ? mask : (mask & ((Word{1} << length) - 1));
  }
  return v;
}

std::vector<std::size_t> BitVector::support() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    Word bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t BitVector::to_mask() const {
  if (length_ > 64) fail("to_mask needs length <= 64");
  return words_.empty() ? 0 : words_[0];
}

std::string BitVector::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.length_ != length_) fail("length mismatch in xor");
  kernels::xor_into(words_, other.words_);
  return *this;
}

bool overlap_parity(const BitVector& a, const BitVector& b) {
  if (a.length_ != b.length_) fail("length mismatch in overlap");
  return kernels::and_parity(a.words_, b.words_);
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

BitMatrix BitMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  std::vector<std::vector<int>> copy;
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  BitMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail("ragged row list");
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] != 0 && rows[r][c] != 1) fail("entries must be 0 or 1");
      m.set(r, c, rows[r][c] == 1);
    }
  }
  return m;
}

BitMatrix BitMatrix::from_row_vectors(std::span<const BitVector> rows, std::size_t cols) {
  BitMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail("row length mismatch");
    std::ranges::copy(rows[r].words(), m.row_words(r).begin());
  }
  return m;
}

BitVector BitMatrix::row(std::size_t r) const {
  BitVector v(cols_);
  std::ranges::copy(row_words(r), v.words().begin());
  return v;
}

BitVector BitMatrix::column(std::size_t c) const {
  BitVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v.set(r, get(r, c));
  return v;
}

std::size_t BitMatrix::column_weight(std::size_t c) const {
  std::size_t w = 0;
  for (std::size_t r = 0; r < rows_; ++r) w += get(r, c) ? 1 : 0;
  return w;
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap_ranges(row_words(a).begin(), row_words(a).end(), row_words(b).begin());
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (get(r, c)) t.set(c, r);
    }
  }
  return t;
}

BitMatrix BitMatrix::select_columns(std::span<const std::size_t> cols) const {
  BitMatrix out(rows_, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] >= cols_) fail("column index out of range");
    for (std::size_t r = 0; r < rows_; ++r) {
      if (get(r, cols[j])) out.set(r, j);
    }
  }
  return out;
}

BitVector mat_vec(const BitMatrix& m, const BitVector& v) {
  if (v.size() != m.cols()) {
    fail("dimension mismatch: matrix has " + std::to_string(m.cols()) + " columns, vector has " +
         std::to_string(v.size()) + " bits");
  }
  BitVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (kernels::and_parity(m.row_words(r), v.words())) out.set(r);
  }
  return out;
}

BitMatrix multiply_transpose(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) fail("dimension mismatch in A·Bᵀ");
  BitMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      if (kernels::and_parity(a.row_words(i), b.row_words(j))) out.set(i, j);
    }
  }
  return out;
}

std::size_t rank(const BitMatrix& m) {
  BitMatrix work = m;
  return eliminate(work, work.cols(), nullptr).size();
}

RowReduction row_reduce(const BitMatrix& m) {
  RowReduction out{m, {}, BitMatrix::identity(m.rows())};
  out.pivot_cols = eliminate(out.reduced, m.cols(), &out.transform);
  return out;
}

std::optional<BitVector> solve_restricted(const BitMatrix& m, const BitVector& s,
                                          std::span<const std::size_t> allowed_cols) {
  if (s.size() != m.rows()) fail("syndrome length does not match matrix rows");
  std::vector<std::size_t> cols(allowed_cols.begin(), allowed_cols.end());
  std::ranges::sort(cols);
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  if (!cols.empty() && cols.back() >= m.cols()) fail("allowed column out of range");

  // Augmented [M_allowed | s].
  const std::size_t k = cols.size();
  BitMatrix aug(m.rows(), k + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      if (m.get(r, cols[j])) aug.set(r, j);
    }
    if (s.get(r)) aug.set(r, k);
  }
  const auto pivots = eliminate(aug, k, nullptr);
  for (std::size_t r = pivots.size(); r < aug.rows(); ++r) {
    if (aug.get(r, k)) return std::nullopt;
  }
  BitVector e(m.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (aug.get(r, k)) e.set(cols[pivots[r]]);
  }
  return e;
}

std::vector<std::size_t> independent_columns(const BitMatrix& m,
                                             std::span<const std::size_t> order) {
  // Incremental basis of column vectors kept in echelon form, keyed by
  // leading row index.
  const std::size_t target = rank(m);
  std::vector<BitVector> basis(m.rows());
  std::vector<bool> has(m.rows(), false);
  std::vector<std::size_t> chosen;
  for (std::size_t c : order) {
    if (chosen.size() == target) break;
    if (c >= m.cols()) fail("column index out of range");
    BitVector v = m.column(c);
    bool independent = false;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (!v.get(r)) continue;
      if (!has[r]) {
        basis[r] = std::move(v);
        has[r] = true;
        independent = true;
        break;
      }
      v ^= basis[r];
    }
    if (independent) chosen.push_back(c);
  }
  return chosen;
}

bool in_row_space(const BitMatrix& m, const BitVector& v) {
  if (v.size() != m.cols()) fail("dimension mismatch in row space test");
  BitMatrix stacked(m.rows() + 1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::ranges::copy(m.row_words(r), stacked.row_words(r).begin());
  }
  std::ranges::copy(v.words(), stacked.row_words(m.rows()).begin());
  return rank(stacked) == rank(m);
}

}  // namespace qec::gf2
