#include "qec/noise.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "qec/error.hpp"

namespace qec::noise {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("noise", what); }

constexpr std::uint64_t kMaxCappedErrors = std::uint64_t{1} << 32;

std::uint64_t next_same_weight(std::uint64_t mask) {
  const std::uint64_t low = mask & (~mask + 1);
  const std::uint64_t ripple = mask + low;
  return (((ripple ^ mask) >> 2) / low) | ripple;
}

}  // namespace

ErrorModel ErrorModel::with_override(std::size_t site, double rate) const {
  ErrorModel copy = *this;
  copy.overrides[site] = rate;
  return copy;
}

std::vector<double> effective_rates(const ErrorModel& model) {
  if (!(model.base_rate >= 0.0 && model.base_rate <= 1.0)) fail("base rate outside [0, 1]");
  std::vector<double> rates(model.n, model.base_rate);
  for (const auto& [site, rate] : model.overrides) {
    if (site >= model.n) fail("override site " + std::to_string(site) + " >= n");
    if (!(rate >= 0.0 && rate <= 1.0)) fail("override rate outside [0, 1]");
    rates[site] = rate;
  }
  return rates;
}

std::uint64_t Rng::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

gf2::BitVector sample_error(std::span<const double> rates, Rng& rng) {
  gf2::BitVector e(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rng.bernoulli(rates[i])) e.set(i);
  }
  return e;
}

gf2::BitVector sample_error(const ErrorModel& model, Rng& rng) {
  const auto rates = effective_rates(model);
  return sample_error(rates, rng);
}

double error_probability(const ErrorModel& model, const gf2::BitVector& e) {
  if (e.size() != model.n) fail("error length does not match model");
  const auto rates = effective_rates(model);
  double log_p = 0.0;
  for (std::size_t i = 0; i < model.n; ++i) {
    const double factor = e.get(i) ? rates[i] : 1.0 - rates[i];
    if (factor == 0.0) return 0.0;
    log_p += std::log(factor);
  }
  return std::exp(log_p);
}

ProbabilityTable::ProbabilityTable(std::span<const double> rates) : log_odds_(rates.size(), 0.0) {
  if (rates.size() > 64) fail("probability table supports at most 64 qubits");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double p = rates[i];
    if (p == 0.0) {
      impossible_if_set_ |= std::uint64_t{1} << i;
    } else if (p == 1.0) {
      impossible_if_clear_ |= std::uint64_t{1} << i;
    } else {
      log_all_clear_ += std::log1p(-p);
      log_odds_[i] = std::log(p) - std::log1p(-p);
    }
  }
}

double ProbabilityTable::log_probability(std::uint64_t mask) const {
  if ((mask & impossible_if_set_) != 0 || (~mask & impossible_if_clear_) != 0) {
    return -std::numeric_limits<double>::infinity();
  }
  double log_p = log_all_clear_;
  for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
    log_p += log_odds_[static_cast<std::size_t>(std::countr_zero(bits))];
  }
  return log_p;
}

double ProbabilityTable::probability(std::uint64_t mask) const {
  return std::exp(log_probability(mask));
}

std::uint64_t enumeration_count(std::size_t n, std::optional<std::size_t> max_weight) {
  const std::size_t cap = max_weight ? std::min(*max_weight, n) : n;
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, w)
  for (std::size_t w = 0; w <= cap; ++w) {
    if (w > 0) {
      // C(n, w) = C(n, w-1) * (n - w + 1) / w, saturating.
      const std::uint64_t factor = n - w + 1;
      binom = binom > std::numeric_limits<std::uint64_t>::max() / factor
                  ? std::numeric_limits<std::uint64_t>::max()
                  : binom * factor / w;
    }
    total = total > std::numeric_limits<std::uint64_t>::max() - binom
                ? std::numeric_limits<std::uint64_t>::max()
                : total + binom;
  }
  return total;
}

void for_each_error_mask(std::size_t n, std::optional<std::size_t> max_weight,
                         const std::function<void(std::uint64_t)>& visit) {
  if (n > 64) fail("enumeration supports at most 64 qubits");
  if (!max_weight && n > 20) fail("unbounded enumeration needs n <= 20, got " + std::to_string(n));
  if (max_weight && enumeration_count(n, max_weight) > kMaxCappedErrors) {
    fail("capped enumeration too large");
  }
  const std::size_t cap = max_weight ? std::min(*max_weight, n) : n;
  visit(0);
  for (std::size_t w = 1; w <= cap; ++w) {
    const std::uint64_t last = w == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1) << (n - w);
    std::uint64_t mask = w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
    while (true) {
      visit(mask);
      if (mask == last) break;
      mask = next_same_weight(mask);
    }
  }
}

ErrorEnumerator::ErrorEnumerator(std::size_t n, std::optional<std::size_t> max_weight)
    : n_(n), max_weight_(max_weight ? std::min(*max_weight, n) : n) {
  if (n > 64) fail("enumeration supports at most 64 qubits");
  if (!max_weight && n > 20) fail("unbounded enumeration needs n <= 20, got " + std::to_string(n));
  total_ = enumeration_count(n, max_weight);
  if (max_weight && total_ > kMaxCappedErrors) fail("capped enumeration too large");
}

std::optional<gf2::BitVector> ErrorEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    mask_ = 0;
    weight_ = 0;
  } else {
    const std::uint64_t last =
        weight_ == 0 ? 0
                     : (weight_ == 64 ? ~std::uint64_t{0}
                                      : ((std::uint64_t{1} << weight_) - 1) << (n_ - weight_));
    if (mask_ == last) {
      if (weight_ == max_weight_) {
        done_ = true;
        return std::nullopt;
      }
      ++weight_;
      mask_ = weight_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << weight_) - 1;
    } else {
      mask_ = next_same_weight(mask_);
    }
  }
  return gf2::BitVector::from_mask(n_, mask_);
}

std::vector<double> weight_distribution(std::span<const double> rates) {
  std::vector<double> dist{1.0};
  for (double p : rates) {
    std::vector<double> next(dist.size() + 1, 0.0);
    for (std::size_t w = 0; w < dist.size(); ++w) {
      next[w] += dist[w] * (1.0 - p);
      next[w + 1] += dist[w] * p;
    }
    dist = std::move(next);
  }
  return dist;
}

double tail_probability(const ErrorModel& model, std::size_t max_weight) {
  const auto rates = effective_rates(model);
  const auto dist = weight_distribution(rates);
  // Sum the upper tail directly; 1 - CDF would cancel catastrophically.
  double tail = 0.0;
  for (std::size_t w = dist.size(); w-- > max_weight + 1;) tail += dist[w];
  return tail;
}

}  // namespace qec::noise
