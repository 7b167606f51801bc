#include "qec/bposd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qec/error.hpp"

namespace qec::bposd {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("bposd", what); }

double clamp_llr(double x) { return std::clamp(x, -kLlrClamp, kLlrClamp); }

gf2::BitMatrix matrix_from_graph(const codes::TannerGraph& graph) {
  gf2::BitMatrix h(graph.check_to_bits.size(), graph.bit_to_checks.size());
  for (std::size_t c = 0; c < graph.check_to_bits.size(); ++c) {
    for (std::size_t b : graph.check_to_bits[c]) h.set(c, b);
  }
  return h;
}

}  // namespace

double clamp_probability(double p) {
  if (std::isnan(p)) fail("prior is NaN");
  return std::clamp(p, kPriorFloor, 1.0 - kPriorFloor);
}

PriorVector::PriorVector(std::vector<double> p) : p_(std::move(p)) {
  for (double& v : p_) v = clamp_probability(v);
}

bool PriorVector::has_high_priors() const {
  return std::ranges::any_of(p_, [](double v) { return v >= 0.5; });
}

Decoder::Decoder(gf2::BitMatrix h, std::size_t max_iter, TieBreak tie_break)
    : h_(std::move(h)), max_iter_(max_iter), tie_break_(tie_break) {
  if (max_iter_ < 1) fail("max_iter must be at least 1");
  bit_edges_.resize(h_.cols());
  check_start_.push_back(0);
  for (std::size_t c = 0; c < h_.rows(); ++c) {
    for (std::size_t b = 0; b < h_.cols(); ++b) {
      if (h_.get(c, b)) {
        bit_edges_[b].push_back(edge_bit_.size());
        edge_bit_.push_back(b);
      }
    }
    check_start_.push_back(edge_bit_.size());
  }
}

BpResult Decoder::bp(const gf2::BitVector& s, const PriorVector& priors) const {
  const std::size_t n = h_.cols();
  const std::size_t m = h_.rows();
  if (s.size() != m) fail("syndrome length does not match number of checks");
  if (priors.size() != n) fail("prior length does not match number of bits");

  std::vector<double> channel(n);
  for (std::size_t v = 0; v < n; ++v) {
    const double p = priors[v];
    channel[v] = clamp_llr(std::log((1.0 - p) / p));
  }

  const std::size_t edges = edge_bit_.size();
  std::vector<double> bit_to_check(edges);
  std::vector<double> check_to_bit(edges, 0.0);
  for (std::size_t e = 0; e < edges; ++e) bit_to_check[e] = channel[edge_bit_[e]];

  std::vector<double> posterior(channel);
  std::vector<double> tanh_half;
  std::vector<double> suffix;
  BpResult out;
  out.hard = gf2::BitVector(n);

  for (std::size_t iter = 1; iter <= max_iter_; ++iter) {
    // Check nodes: tanh rule with leave-one-out products (prefix × suffix).
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t begin = check_start_[c];
      const std::size_t degree = check_start_[c + 1] - begin;
      if (degree == 0) continue;
      tanh_half.resize(degree);
      suffix.resize(degree + 1);
      for (std::size_t j = 0; j < degree; ++j) tanh_half[j] = std::tanh(0.5 * bit_to_check[begin + j]);
      suffix[degree] = 1.0;
      for (std::size_t j = degree; j-- > 0;) suffix[j] = suffix[j + 1] * tanh_half[j];
      const double sign = s.get(c) ? -1.0 : 1.0;
      double prefix = 1.0;
      for (std::size_t j = 0; j < degree; ++j) {
        const double others = prefix * suffix[j + 1];
        check_to_bit[begin + j] = clamp_llr(sign * 2.0 * std::atanh(std::clamp(others, -1.0, 1.0)));
        prefix *= tanh_half[j];
      }
    }

    // Bit nodes: posteriors, hard decision, extrinsic messages.
    for (std::size_t v = 0; v < n; ++v) {
      double total = channel[v];
      for (std::size_t e : bit_edges_[v]) total += check_to_bit[e];
      posterior[v] = total;
      out.hard.set(v, total < 0.0);
      for (std::size_t e : bit_edges_[v]) bit_to_check[e] = clamp_llr(total - check_to_bit[e]);
    }
    out.iterations = iter;

    bool satisfied = true;
    for (std::size_t c = 0; c < m && satisfied; ++c) {
      bool parity = false;
      for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) {
        parity ^= out.hard.get(edge_bit_[e]);
      }
      satisfied = parity == s.get(c);
    }
    if (satisfied) {
      out.converged = true;
      break;
    }
  }

  out.soft.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.soft[v] = 1.0 / (1.0 + std::exp(posterior[v]));
  return out;
}

gf2::BitVector Decoder::osd0(const gf2::BitVector& s, std::span<const double> soft) const {
  if (soft.size() != h_.cols()) fail("soft vector length does not match number of bits");
  if (s.size() != h_.rows()) fail("syndrome length does not match number of checks");
  std::vector<std::size_t> order(h_.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (tie_break_ == TieBreak::descending_index) std::ranges::reverse(order);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return soft[a] > soft[b]; });
  const auto chosen = gf2::independent_columns(h_, order);
  auto solution = gf2::solve_restricted(h_, s, chosen);
  if (!solution) fail("syndrome is outside the column space of H");
  return *std::move(solution);
}

DecodeResult Decoder::decode(const gf2::BitVector& s, const PriorVector& priors) const {
  BpResult bp_out = bp(s, priors);
  DecodeResult out;
  out.bp_converged = bp_out.converged;
  out.osd_used = !bp_out.converged;
  out.iterations = bp_out.iterations;
  out.correction = bp_out.converged ? std::move(bp_out.hard) : osd0(s, bp_out.soft);
  out.soft = std::move(bp_out.soft);
  return out;
}

BpResult bp_decode(const codes::TannerGraph& graph, const gf2::BitVector& s,
                   const PriorVector& priors, std::size_t max_iter) {
  return Decoder(matrix_from_graph(graph), max_iter).bp(s, priors);
}

gf2::BitVector osd0(const gf2::BitMatrix& h, const gf2::BitVector& s, std::span<const double> soft,
                    TieBreak tie_break) {
  return Decoder(h, kDefaultMaxIter, tie_break).osd0(s, soft);
}

DecodeResult decode(const gf2::BitMatrix& h, const gf2::BitVector& s, const PriorVector& priors,
                    std::size_t max_iter) {
  return Decoder(h, max_iter).decode(s, priors);
}

}  // namespace qec::bposd
