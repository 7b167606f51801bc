#include "qec/codes.hpp"

#include <algorithm>
#include <bit>

#include "qec/error.hpp"

namespace qec::codes {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("codes", what); }

void require_distance(std::size_t d) {
  if (d < 2) fail("distance must be at least 2, got " + std::to_string(d));
}

gf2::BitMatrix rows_to_matrix(const std::vector<std::vector<std::size_t>>& supports,
                              std::size_t n) {
  gf2::BitMatrix m(supports.size(), n);
  for (std::size_t r = 0; r < supports.size(); ++r) {
    for (std::size_t q : supports[r]) m.set(r, q);
  }
  return m;
}

}  // namespace

CssCode rotated_surface(std::size_t d) {
  require_distance(d);
  const int D = static_cast<int>(d);
  CssCode code;
  code.name = "rotated_surface_d" + std::to_string(d);
  code.family = Family::rotated;
  code.n = d * d;
  code.k = 1;
  code.d = d;

  for (int r = 0; r < D; ++r) {
    for (int c = 0; c < D; ++c) code.coords.push_back({r, c});
  }

  std::vector<std::vector<std::size_t>> z_rows;
  std::vector<std::vector<std::size_t>> x_rows;
  for (int r = -1; r < D; ++r) {
    for (int c = -1; c < D; ++c) {
      const bool z_type = ((r + c) % 2 + 2) % 2 == 0;
      const bool vertical_edge = (c == -1 || c == D - 1);
      const bool horizontal_edge = (r == -1 || r == D - 1);
      if (vertical_edge && horizontal_edge) continue;
      if (horizontal_edge && !z_type) continue;
      if (vertical_edge && z_type) continue;
      std::vector<std::size_t> support;
      for (int dr = 0; dr <= 1; ++dr) {
        for (int dc = 0; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < D && cc >= 0 && cc < D) {
            support.push_back(static_cast<std::size_t>(rr * D + cc));
          }
        }
      }
      (z_type ? z_rows : x_rows).push_back(std::move(support));
    }
  }
  code.hz = rows_to_matrix(z_rows, code.n);
  code.hx = rows_to_matrix(x_rows, code.n);

  code.logical_z = gf2::BitVector(code.n);
  code.logical_x = gf2::BitVector(code.n);
  for (std::size_t i = 0; i < d; ++i) {
    code.logical_z.set(i * d);
    code.logical_x.set(i);
  }
  return code;
}

CssCode unrotated_surface(std::size_t d) {
  require_distance(d);
  const int size = 2 * static_cast<int>(d) - 1;
  CssCode code;
  code.name = "unrotated_surface_d" + std::to_string(d);
  code.family = Family::unrotated;
  code.k = 1;
  code.d = d;

  std::vector<int> index(static_cast<std::size_t>(size * size), -1);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if ((r + c) % 2 == 0) {
        index[static_cast<std::size_t>(r * size + c)] = static_cast<int>(code.coords.size());
        code.coords.push_back({r, c});
      }
    }
  }
  code.n = code.coords.size();

  auto neighbours = [&](int r, int c) {
    std::vector<std::size_t> support;
    constexpr std::array<std::array<int, 2>, 4> steps{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
    for (const auto& [dr, dc] : steps) {
      const int rr = r + dr;
      const int cc = c + dc;
      if (rr >= 0 && rr < size && cc >= 0 && cc < size) {
        support.push_back(static_cast<std::size_t>(index[static_cast<std::size_t>(rr * size + cc)]));
      }
    }
    std::ranges::sort(support);
    return support;
  };

  std::vector<std::vector<std::size_t>> z_rows;
  std::vector<std::vector<std::size_t>> x_rows;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if ((r + c) % 2 == 0) continue;
      (r % 2 == 0 ? z_rows : x_rows).push_back(neighbours(r, c));
    }
  }
  code.hz = rows_to_matrix(z_rows, code.n);
  code.hx = rows_to_matrix(x_rows, code.n);

  code.logical_z = gf2::BitVector(code.n);
  code.logical_x = gf2::BitVector(code.n);
  for (int i = 0; i < size; i += 2) {
    code.logical_z.set(static_cast<std::size_t>(index[static_cast<std::size_t>(i * size)]));
    code.logical_x.set(static_cast<std::size_t>(index[static_cast<std::size_t>(i)]));
  }
  return code;
}

CssCode make_surface(Family family, std::size_t d) {
  return family == Family::rotated ? rotated_surface(d) : unrotated_surface(d);
}

std::string to_string(Family family) {
  return family == Family::rotated ? "rotated" : "unrotated";
}

Family family_from_string(const std::string& name) {
  if (name == "rotated") return Family::rotated;
  if (name == "unrotated") return Family::unrotated;
  fail("unknown code family '" + name + "' (expected rotated or unrotated)");
}

TannerGraph tanner(const gf2::BitMatrix& h) {
  TannerGraph g;
  g.check_to_bits.resize(h.rows());
  g.bit_to_checks.resize(h.cols());
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) {
      if (h.get(r, c)) {
        g.check_to_bits[r].push_back(c);
        g.bit_to_checks[c].push_back(r);
      }
    }
  }
  return g;
}

std::size_t min_logical_weight(const CssCode& code, Sector sector) {
  if (code.n > 26) fail("min_logical_weight is exhaustive; n must be <= 26, got " +
                        std::to_string(code.n));
  const gf2::BitMatrix& checks = sector == Sector::x_flip ? code.hz : code.hx;
  const gf2::BitVector& logical = sector == Sector::x_flip ? code.logical_z : code.logical_x;
  if (checks.rows() > 64) fail("too many checks for the exhaustive oracle");

  std::vector<std::uint64_t> column_syndrome(code.n, 0);
  for (std::size_t c = 0; c < code.n; ++c) {
    for (std::size_t r = 0; r < checks.rows(); ++r) {
      if (checks.get(r, c)) column_syndrome[c] |= std::uint64_t{1} << r;
    }
  }
  const std::uint64_t logical_mask = logical.to_mask();
  const std::uint64_t limit = std::uint64_t{1} << code.n;

  for (std::size_t w = 1; w <= code.n; ++w) {
    // Gosper's hack over all n-bit masks of popcount w.
    std::uint64_t mask = (std::uint64_t{1} << w) - 1;
    while (mask < limit) {
      if ((std::popcount(mask & logical_mask) & 1) != 0) {
        std::uint64_t syndrome = 0;
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
          syndrome ^= column_syndrome[static_cast<std::size_t>(std::countr_zero(bits))];
        }
        if (syndrome == 0) return w;
      }
      const std::uint64_t low = mask & (~mask + 1);
      const std::uint64_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
  }
  fail("code has no nontrivial logical in this sector");
}

std::map<std::size_t, std::size_t> row_weight_histogram(const gf2::BitMatrix& h) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t r = 0; r < h.rows(); ++r) ++hist[h.row_weight(r)];
  return hist;
}

std::size_t stabilizer_partner(const CssCode& code, std::size_t site) {
  if (site >= code.n) fail("site out of range");
  const gf2::BitVector column = code.hz.column(site);
  for (std::size_t q = 0; q < code.n; ++q) {
    if (q != site && code.hz.column(q) == column) return q;
  }
  return code.n;
}

}  // namespace qec::codes
