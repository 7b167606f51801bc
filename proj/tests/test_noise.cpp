#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qec/error.hpp"
#include "qec/noise.hpp"

using namespace qec;
using noise::ErrorModel;

TEST_SUITE("noise") {

TEST_CASE("effective rates") {
  CHECK(noise::effective_rates(ErrorModel::iid(4, 0.01)) == std::vector<double>(4, 0.01));
  CHECK(noise::effective_rates(ErrorModel::iid(4, 0.01).with_override(0, 1.0 / 3.0)) ==
        std::vector<double>{1.0 / 3.0, 0.01, 0.01, 0.01});
  CHECK(noise::effective_rates(ErrorModel::iid(2, 0.0).with_override(1, 1.0)) ==
        std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(noise::effective_rates(ErrorModel::iid(2, 0.1).with_override(2, 0.1)), Error);
  CHECK_THROWS_AS(noise::effective_rates(ErrorModel::iid(2, 1.5)), Error);
}

TEST_CASE("sampling") {
  noise::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(noise::sample_error(ErrorModel::iid(20, 0.0), rng).is_zero());
    CHECK(noise::sample_error(ErrorModel::iid(20, 1.0), rng).weight() == 20);
  }
  const std::size_t n = 8;
  const int samples = 100000;
  std::vector<int> ones(n, 0);
  for (int i = 0; i < samples; ++i) {
    const auto e = noise::sample_error(ErrorModel::iid(n, 0.5), rng);
    for (std::size_t q = 0; q < n; ++q) ones[q] += e.get(q) ? 1 : 0;
  }
  for (int c : ones) CHECK(std::abs(static_cast<double>(c) / samples - 0.5) < 0.01);
}

TEST_CASE("rng is reproducible and streams differ") {
  noise::Rng a(42);
  noise::Rng b(42);
  noise::Rng c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
  auto s1 = a.split(1);
  auto s2 = a.split(2);
  auto s1b = a.split(1);
  const double u = s1.uniform();
  CHECK(u == s1b.uniform());
  CHECK(u != s2.uniform());
}

TEST_CASE("error probability") {
  CHECK(noise::error_probability(ErrorModel::iid(3, 0.0), gf2::BitVector(3)) == 1.0);
  const auto m = ErrorModel::iid(2, 0.01).with_override(0, 1.0 / 3.0);
  CHECK(noise::error_probability(m, gf2::BitVector::from_string("10")) ==
        doctest::Approx(0.33).epsilon(1e-12));
  CHECK_THROWS_AS(noise::error_probability(m, gf2::BitVector(3)), Error);

  const std::vector<double> rates{0.1, 0.0, 1.0, 0.3};
  const noise::ProbabilityTable table(rates);
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    CHECK(table.probability(mask) == doctest::Approx(oracle::probability(rates, mask)).epsilon(1e-12));
  }
}

TEST_CASE("probabilities sum to one") {
  for (std::size_t n : {1, 5, 12, 16}) {
    std::vector<double> rates(n);
    for (std::size_t i = 0; i < n; ++i) rates[i] = 0.001 + 0.4 * static_cast<double>(i) / n;
    const noise::ProbabilityTable table(rates);
    long double sum = 0.0L;
    noise::for_each_error_mask(n, std::nullopt, [&](std::uint64_t m) { sum += table.probability(m); });
    CHECK(std::abs(static_cast<double>(sum) - 1.0) < 1e-12);
  }
}

TEST_CASE("enumeration counts and order") {
  CHECK(noise::enumeration_count(3, std::nullopt) == 8);
  CHECK(noise::enumeration_count(5, 0) == 1);
  double expected = 0.0;
  for (int w = 0; w <= 6; ++w) expected += oracle::binomial(36, w);
  CHECK(noise::enumeration_count(36, 6) == static_cast<std::uint64_t>(expected));
  CHECK(noise::enumeration_count(36, 6) == 2391496);

  std::vector<std::uint64_t> seen;
  noise::for_each_error_mask(5, 0, [&](std::uint64_t m) { seen.push_back(m); });
  CHECK(seen == std::vector<std::uint64_t>{0});

  seen.clear();
  noise::for_each_error_mask(10, 3, [&](std::uint64_t m) { seen.push_back(m); });
  CHECK(seen.size() == noise::enumeration_count(10, 3));
  CHECK(std::set<std::uint64_t>(seen.begin(), seen.end()).size() == seen.size());
  for (std::size_t i = 1; i < seen.size(); ++i) {
    const int wa = oracle::popcount(seen[i - 1]);
    const int wb = oracle::popcount(seen[i]);
    CHECK((wa < wb || (wa == wb && seen[i - 1] < seen[i])));
  }

  noise::ErrorEnumerator it(10, 3);
  CHECK(it.total() == seen.size());
  std::size_t k = 0;
  while (auto e = it.next()) {
    REQUIRE(k < seen.size());
    CHECK(e->to_mask() == seen[k++]);
  }
  CHECK(k == seen.size());

  CHECK_THROWS_AS(noise::for_each_error_mask(21, std::nullopt, [](std::uint64_t) {}), Error);
  CHECK_THROWS_AS(noise::ErrorEnumerator(64, 20), Error);
}

TEST_CASE("tail probability") {
  CHECK(noise::tail_probability(ErrorModel::iid(7, 0.2), 7) == 0.0);
  CHECK(noise::tail_probability(ErrorModel::iid(2, 0.5), 1) == doctest::Approx(0.25));
  const double eps = 0.01;
  double head = 0.0;
  for (int w = 0; w <= 6; ++w) head += oracle::binomial(36, w) * std::pow(eps, w) * std::pow(1 - eps, 36 - w);
  const double t1 = noise::tail_probability(ErrorModel::iid(36, eps), 6);
  CHECK(std::abs(t1 - (1.0 - head)) <= 1e-6 * t1);
  // Tiny tails are resolved rather than cancelled to zero.
  double tail = 0.0;
  for (int w = 7; w <= 36; ++w) tail += oracle::binomial(36, w) * std::pow(1e-4, w) * std::pow(1 - 1e-4, 36 - w);
  const double t2 = noise::tail_probability(ErrorModel::iid(36, 1e-4), 6);
  CHECK(t2 > 0.0);
  CHECK(std::abs(t2 - tail) <= 1e-9 * tail);
}

TEST_CASE("tail is consistent with enumeration at small n") {
  const auto model = ErrorModel::iid(12, 0.07).with_override(3, 1.0 / 3.0);
  const auto rates = noise::effective_rates(model);
  for (std::size_t cap = 0; cap <= 12; ++cap) {
    double head = 0.0;
    noise::for_each_error_mask(12, cap, [&](std::uint64_t m) { head += oracle::probability(rates, m); });
    CHECK(noise::tail_probability(model, cap) == doctest::Approx(1.0 - head).epsilon(1e-10));
  }
}

}
