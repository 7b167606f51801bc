#pragma once
// Planar surface codes as CSS code objects.
//
// Qubit indexing for both families is row-major over the data qubits with
// index 0 at the top-left corner. `coords` records the lattice position of
// every index so configs can name sites stably.
//
// Rotated code (n = d²): data qubit (r, c) sits at grid point r*d + c.
// Plaquette (r, c) for r, c ∈ [-1, d-1] covers the in-range qubits among
// (r, c), (r, c+1), (r+1, c), (r+1, c+1). It is a Z-check when r + c is even
// and an X-check otherwise. Bulk plaquettes are always present, weight-2
// Z-checks sit on the top and bottom edges and weight-2 X-checks on the left
// and right edges. Qubit 0 shares a weight-2 X-check with qubit d, so bit
// flips on 0 and d are stabilizer-equivalent.
//
// Unrotated code (n = d² + (d-1)²): on a (2d-1)×(2d-1) grid, data qubits
// sit where r + c is even, Z-checks where r is even and c odd, X-checks where
// r is odd and c even. Checks have weight 3 on the boundary and 4 inside, and
// every column of hz is distinct.
//
// In both families logical_z is the leftmost data column and logical_x the
// top data row.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qec/gf2.hpp"

namespace qec::codes {

enum class Family { rotated, unrotated };

struct CssCode {
  std::string name;
  Family family = Family::rotated;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  gf2::BitMatrix hz;  // Z-checks, detect bit flips
  gf2::BitMatrix hx;  // X-checks
  gf2::BitVector logical_z;
  gf2::BitVector logical_x;
  std::vector<std::array<int, 2>> coords;  // lattice (row, col) of each data qubit
};

CssCode rotated_surface(std::size_t d);
CssCode unrotated_surface(std::size_t d);
CssCode make_surface(Family family, std::size_t d);

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct TannerGraph {
  std::vector<std::vector<std::size_t>> check_to_bits;
  std::vector<std::vector<std::size_t>> bit_to_checks;
};

TannerGraph tanner(const gf2::BitMatrix& h);

enum class Sector { x_flip, z_flip };

/// Exhaustive minimum weight of a nontrivial logical in the given sector.
/// x_flip: smallest e with hz·e = 0 and odd overlap with logical_z.
/// Requires n <= 26.
std::size_t min_logical_weight(const CssCode& code, Sector sector = Sector::x_flip);

/// Histogram row weight -> number of rows.
std::map<std::size_t, std::size_t> row_weight_histogram(const gf2::BitMatrix& h);

/// Weight-2 X-check partner of `site` (the qubit whose bit flip has the same
/// Z-syndrome), or n when there is none.
std::size_t stabilizer_partner(const CssCode& code, std::size_t site);

}  // namespace qec::codes
