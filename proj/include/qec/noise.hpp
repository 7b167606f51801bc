#pragma once
// Independent bit-flip noise: effective per-qubit rates, seeded sampling,
// exact probabilities, error enumeration and weight-tail probabilities.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "qec/gf2.hpp"

namespace qec::noise {

struct ErrorModel {
  std::size_t n = 0;
  double base_rate = 0.0;
  std::map<std::size_t, double> overrides;

  static ErrorModel iid(std::size_t n, double rate) { return {n, rate, {}}; }
  ErrorModel with_override(std::size_t site, double rate) const;
};

/// Validates the model and returns rate_i for every qubit.
std::vector<double> effective_rates(const ErrorModel& model);

/// Seeded 64-bit generator. Independent streams for workers or seeds are
/// derived with `split`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 1))); }

 private:
  static std::uint64_t mix(std::uint64_t x);  // splitmix64 finaliser
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

gf2::BitVector sample_error(const ErrorModel& model, Rng& rng);
gf2::BitVector sample_error(std::span<const double> rates, Rng& rng);

/// ∏ rate_i^{e_i} (1 - rate_i)^{1 - e_i}, accumulated in log space.
double error_probability(const ErrorModel& model, const gf2::BitVector& e);

/// Precomputed log-space terms for repeated probability evaluation over
/// masks of up to 64 qubits.
class ProbabilityTable {
 public:
  explicit ProbabilityTable(std::span<const double> rates);
  double probability(std::uint64_t mask) const;
  double log_probability(std::uint64_t mask) const;

 private:
  double log_all_clear_ = 0.0;              // Σ log(1 - p_i) over p_i < 1
  std::vector<double> log_odds_;            // log(p_i / (1 - p_i)) for regular sites
  std::uint64_t impossible_if_set_ = 0;     // sites with p_i == 0
  std::uint64_t impossible_if_clear_ = 0;   // sites with p_i == 1
};

/// Number of weight ≤ max_weight vectors of length n (saturating).
std::uint64_t enumeration_count(std::size_t n, std::optional<std::size_t> max_weight);

/// Visits every error of weight ≤ max_weight (all 2^n when unbounded) in
/// weight-then-lexicographic order, as a bit mask. Requires n <= 64.
/// Unbounded mode requires n <= 20; capped mode requires at most 2^32 errors.
void for_each_error_mask(std::size_t n, std::optional<std::size_t> max_weight,
                         const std::function<void(std::uint64_t)>& visit);

/// Same stream as for_each_error_mask, materialised as BitVectors.
class ErrorEnumerator {
 public:
  ErrorEnumerator(std::size_t n, std::optional<std::size_t> max_weight);
  std::optional<gf2::BitVector> next();
  std::uint64_t total() const noexcept { return total_; }

 private:
  std::size_t n_;
  std::size_t max_weight_;
  std::size_t weight_ = 0;
  std::uint64_t mask_ = 0;
  std::uint64_t total_ = 0;
  bool started_ = false;
  bool done_ = false;
};

/// Probability that a sample has weight > max_weight, via the exact
/// Poisson-binomial weight distribution.
double tail_probability(const ErrorModel& model, std::size_t max_weight);

/// Full Poisson-binomial weight distribution, index w holds P(weight = w).
std::vector<double> weight_distribution(std::span<const double> rates);

}  // namespace qec::noise
