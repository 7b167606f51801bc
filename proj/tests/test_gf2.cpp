#include "doctest.h"

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qec/codes.hpp"
#include "qec/error.hpp"
#include "qec/gf2.hpp"

using namespace qec;
using gf2::BitMatrix;
using gf2::BitVector;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density) {
  std::bernoulli_distribution bit(density);
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, bit(rng));
  }
  return m;
}

BitVector random_vector(std::mt19937_64& rng, std::size_t n) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, (rng() & 1U) != 0);
  return v;
}

// a · b over GF(2) via the library's A·Bᵀ.
BitMatrix multiply(const BitMatrix& a, const BitMatrix& b) {
  return gf2::multiply_transpose(a, b.transpose());
}

}  // namespace

TEST_SUITE("gf2") {

TEST_CASE("bit vector basics") {
  auto v = BitVector::from_string("10110");
  CHECK(v.size() == 5);
  CHECK(v.weight() == 3);
  CHECK(v.support() == std::vector<std::size_t>{0, 2, 3});
  CHECK(v.to_string() == "10110");
  CHECK(v.to_mask() == 0b01101);
  CHECK(BitVector::from_mask(5, 0b01101) == v);
  CHECK(BitVector::from_indices(5, {0, 2, 3}) == v);
  v.flip(0);
  CHECK(v.to_string() == "00110");
  const auto w = BitVector::from_string("01100");
  CHECK(overlap_parity(v, w) == true);
  CHECK((v ^ w).to_string() == "01010");
  BitVector big(130);
  big.set(129);
  CHECK(big.weight() == 1);
  CHECK_FALSE(big.is_zero());
}

TEST_CASE("mat_vec examples") {
  CHECK(gf2::mat_vec(BitMatrix::identity(3), BitVector::from_string("101")).to_string() == "101");
  CHECK(gf2::mat_vec(BitMatrix(2, 3), BitVector::from_string("111")).to_string() == "00");
  const auto h = BitMatrix::from_rows({{1, 1, 1, 1}});
  CHECK(gf2::mat_vec(h, BitVector::from_string("1100")).to_string() == "0");
  CHECK_THROWS_AS(gf2::mat_vec(h, BitVector(3)), Error);
}

TEST_CASE("mat_vec is linear and matches the dense oracle") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t rows = 1 + rng() % 20;
    const std::size_t cols = 1 + rng() % 140;
    const auto m = random_matrix(rng, rows, cols, 0.3);
    const auto a = random_vector(rng, cols);
    const auto b = random_vector(rng, cols);
    CHECK(gf2::mat_vec(m, a ^ b) == (gf2::mat_vec(m, a) ^ gf2::mat_vec(m, b)));
    CHECK(oracle::to_ints(gf2::mat_vec(m, a)) == oracle::mat_vec(oracle::to_dense(m), oracle::to_ints(a)));
  }
}

TEST_CASE("rank examples") {
  CHECK(gf2::rank(BitMatrix::identity(4)) == 4);
  CHECK(gf2::rank(BitMatrix(3, 5)) == 0);
  const auto code = codes::rotated_surface(3);
  CHECK(gf2::rank(code.hz) == oracle::rank(oracle::to_dense(code.hz)));
  CHECK(gf2::rank(code.hz) == 4);
}

TEST_CASE("rank agrees with the oracle on random matrices") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rows = 1 + rng() % 30;
    const std::size_t cols = 1 + rng() % 90;
    const double density = rep % 3 == 0 ? 0.05 : 0.4;
    const auto m = random_matrix(rng, rows, cols, density);
    CHECK(gf2::rank(m) == oracle::rank(oracle::to_dense(m)));
    CHECK(gf2::rank(m) == gf2::rank(m.transpose()));
  }
}

TEST_CASE("row_reduce examples") {
  const auto id = gf2::row_reduce(BitMatrix::identity(3));
  CHECK(id.reduced == BitMatrix::identity(3));
  CHECK(id.pivot_cols == std::vector<std::size_t>{0, 1, 2});

  const auto twin = gf2::row_reduce(BitMatrix::from_rows({{1, 1}, {1, 1}}));
  CHECK(twin.pivot_cols == std::vector<std::size_t>{0});
  CHECK(twin.reduced.row(1).is_zero());

  const auto code = codes::rotated_surface(3);
  CHECK(gf2::row_reduce(code.hz).pivot_cols.size() == 4);
}

TEST_CASE("row_reduce produces RREF with a valid transform") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t rows = 1 + rng() % 16;
    const std::size_t cols = 1 + rng() % 70;
    const auto m = random_matrix(rng, rows, cols, 0.35);
    const auto rr = gf2::row_reduce(m);
    CHECK(multiply(rr.transform, m) == rr.reduced);
    CHECK(gf2::rank(rr.transform) == rows);  // invertible
    CHECK(rr.pivot_cols.size() == oracle::rank(oracle::to_dense(m)));
    for (std::size_t i = 0; i < rr.pivot_cols.size(); ++i) {
      if (i > 0) CHECK(rr.pivot_cols[i] > rr.pivot_cols[i - 1]);
      const auto col = rr.reduced.column(rr.pivot_cols[i]);
      CHECK(col == BitVector::from_indices(rows, {i}));
    }
    for (std::size_t r = rr.pivot_cols.size(); r < rows; ++r) CHECK(rr.reduced.row(r).is_zero());
    // Idempotent on its own output.
    CHECK(gf2::row_reduce(rr.reduced).reduced == rr.reduced);
  }
}

TEST_CASE("solve_restricted examples") {
  const auto m = BitMatrix::from_rows({{1, 1}, {0, 1}});
  const std::vector<std::size_t> none;
  CHECK(gf2::solve_restricted(m, BitVector(2), none)->is_zero());
  const std::vector<std::size_t> both{0, 1};
  CHECK(gf2::solve_restricted(m, BitVector::from_string("11"), both)->to_string() == "01");
  const std::vector<std::size_t> only0{0};
  CHECK_FALSE(gf2::solve_restricted(m, BitVector::from_string("01"), only0).has_value());
}

TEST_CASE("solve_restricted on single flips of the d=3 rotated code") {
  const auto code = codes::rotated_surface(3);
  const auto dense = oracle::to_dense(code.hz);
  std::vector<std::size_t> all(code.n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t q = 0; q < code.n; ++q) {
    const auto s = gf2::mat_vec(code.hz, BitVector::from_indices(code.n, {q}));
    const auto e = gf2::solve_restricted(code.hz, s, all);
    REQUIRE(e.has_value());
    CHECK(gf2::mat_vec(code.hz, *e) == s);
    // Brute force confirms some weight <= 2 error reproduces s.
    bool found = false;
    oracle::for_each_mask(code.n, 2, [&](std::uint64_t mask) {
      if (oracle::mat_vec(dense, oracle::bits_of(mask, code.n)) == oracle::to_ints(s)) found = true;
    });
    CHECK(found);
  }
}

TEST_CASE("solve_restricted is sound and complete on random systems") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t rows = 1 + rng() % 6;
    const std::size_t cols = 1 + rng() % 10;
    const auto m = random_matrix(rng, rows, cols, 0.4);
    const auto s = random_vector(rng, rows);
    std::vector<std::size_t> allowed;
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() % 3 != 0) allowed.push_back(c);
    }
    std::uint64_t allowed_mask = 0;
    for (std::size_t c : allowed) allowed_mask |= std::uint64_t{1} << c;
    bool reachable = false;
    const auto dense = oracle::to_dense(m);
    oracle::for_each_mask(cols, static_cast<int>(cols), [&](std::uint64_t mask) {
      if ((mask & ~allowed_mask) == 0 &&
          oracle::mat_vec(dense, oracle::bits_of(mask, cols)) == oracle::to_ints(s)) {
        reachable = true;
      }
    });
    const auto e = gf2::solve_restricted(m, s, allowed);
    CHECK(e.has_value() == reachable);
    if (e) {
      CHECK(gf2::mat_vec(m, *e) == s);
      CHECK((e->to_mask() & ~allowed_mask) == 0);
    }
  }
}

TEST_CASE("independent_columns keeps rank many independent columns in scan order") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t rows = 1 + rng() % 10;
    const std::size_t cols = 1 + rng() % 30;
    const auto m = random_matrix(rng, rows, cols, 0.3);
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto kept = gf2::independent_columns(m, order);
    CHECK(kept.size() == gf2::rank(m));
    CHECK(gf2::rank(m.select_columns(kept)) == kept.size());
    // Greedy: every skipped column before the last kept one is dependent on
    // the kept columns that precede it.
    std::vector<std::size_t> prefix;
    std::size_t next_kept = 0;
    for (std::size_t c : order) {
      if (next_kept == kept.size()) break;
      if (c == kept[next_kept]) {
        prefix.push_back(c);
        ++next_kept;
      } else {
        auto with = prefix;
        with.push_back(c);
        CHECK(gf2::rank(m.select_columns(with)) == prefix.size());
      }
    }
  }
}

TEST_CASE("in_row_space matches subset enumeration") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 80; ++rep) {
    const std::size_t rows = 1 + rng() % 6;
    const std::size_t cols = 1 + rng() % 12;
    const auto m = random_matrix(rng, rows, cols, 0.4);
    auto v = random_vector(rng, cols);
    if (rep % 2 == 0) {
      v = BitVector(cols);
      for (std::size_t r = 0; r < rows; ++r) {
        if (rng() & 1U) v ^= m.row(r);
      }
    }
    CHECK(gf2::in_row_space(m, v) == oracle::in_row_space(oracle::to_dense(m), oracle::to_ints(v)));
  }
}

TEST_CASE("transpose and multiply_transpose") {
  std::mt19937_64 rng(7);
  const auto a = random_matrix(rng, 9, 70, 0.5);
  const auto b = random_matrix(rng, 5, 70, 0.5);
  CHECK(a.transpose().transpose() == a);
  const auto p = gf2::multiply_transpose(a, b);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) CHECK(p.get(i, j) == overlap_parity(a.row(i), b.row(j)));
  }
  CHECK_THROWS_AS(gf2::multiply_transpose(a, BitMatrix(2, 3)), Error);
}

}
