#pragma once
// Belief propagation with ordered-statistics (OSD-0) fallback.
//
// BP is sum-product in the log-likelihood-ratio domain with a flooding
// schedule. Messages are clamped to ±30 and priors to [1e-12, 1 - 1e-12].
// When BP fails to reach a syndrome-consistent hard decision within
// max_iter iterations, OSD-0 supplies the correction and the reported soft
// output stays the final-iteration BP marginals.

#include <cstddef>
#include <span>
#include <vector>

#include "qec/codes.hpp"
#include "qec/gf2.hpp"

namespace qec::bposd {

inline constexpr double kPriorFloor = 1e-12;
inline constexpr double kLlrClamp = 30.0;
inline constexpr std::size_t kDefaultMaxIter = 50;

/// Per-qubit bit-flip probabilities fed to the decoder, clamped on entry.
class PriorVector {
 public:
  PriorVector() = default;
  explicit PriorVector(std::vector<double> p);
  static PriorVector uniform(std::size_t n, double p) { return PriorVector(std::vector<double>(n, p)); }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }
  /// Any prior at or above 1/2, where BP loses its bias toward low weight.
  bool has_high_priors() const;

  friend bool operator==(const PriorVector&, const PriorVector&) = default;

 private:
  std::vector<double> p_;
};

double clamp_probability(double p);

struct BpResult {
  std::vector<double> soft;  // posterior flip probabilities
  gf2::BitVector hard;
  bool converged = false;
  std::size_t iterations = 0;
};

struct DecodeResult {
  gf2::BitVector correction;
  std::vector<double> soft;
  bool bp_converged = false;
  bool osd_used = false;
  std::size_t iterations = 0;
};

/// Order in which OSD-0 visits columns whose soft values are exactly equal.
enum class TieBreak { ascending_index, descending_index };
inline constexpr TieBreak kDefaultTieBreak = TieBreak::descending_index;

/// Reusable decoder for one parity-check matrix. Decoding is a pure
/// function of (syndrome, priors); message buffers are allocated per call,
/// so a const Decoder may be shared across threads.
class Decoder {
 public:
  explicit Decoder(gf2::BitMatrix h, std::size_t max_iter = kDefaultMaxIter,
                   TieBreak tie_break = kDefaultTieBreak);

  const gf2::BitMatrix& matrix() const noexcept { return h_; }
  std::size_t max_iter() const noexcept { return max_iter_; }
  TieBreak tie_break() const noexcept { return tie_break_; }

  BpResult bp(const gf2::BitVector& s, const PriorVector& priors) const;
  gf2::BitVector osd0(const gf2::BitVector& s, std::span<const double> soft) const;
  DecodeResult decode(const gf2::BitVector& s, const PriorVector& priors) const;

 private:
  gf2::BitMatrix h_;
  std::size_t max_iter_;
  TieBreak tie_break_;
  // Edges grouped by check: check c owns edges [check_start_[c], check_start_[c+1]).
  std::vector<std::size_t> check_start_;
  std::vector<std::size_t> edge_bit_;
  // For each bit, the ids of its edges.
  std::vector<std::vector<std::size_t>> bit_edges_;
};

BpResult bp_decode(const codes::TannerGraph& graph, const gf2::BitVector& s,
                   const PriorVector& priors, std::size_t max_iter);

/// OSD-0: columns ordered by soft value (descending, exact ties per
/// `tie_break`), the first rank(H) independent ones solve H·e = s.
gf2::BitVector osd0(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> soft,
                    TieBreak tie_break = kDefaultTieBreak);

DecodeResult decode(const gf2::BitMatrix& h, const gf2::BitVector& s, const PriorVector& priors,
                    std::size_t max_iter = kDefaultMaxIter);

}  // namespace qec::bposd
