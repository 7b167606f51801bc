#include "qec/experiments.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "qec/error.hpp"

namespace qec::experiments {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("experiments", what); }

// Dense syndrome tables are used up to this many checks; beyond it a hash map.
constexpr std::size_t kDenseSyndromeBits = 24;

std::uint64_t to_mask(const gf2::BitVector& v) { return v.to_mask(); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::identical_qubits:
      return "identical_qubits";
    case CaseId::unknown_bad_qubit:
      return "unknown_bad_qubit";
    case CaseId::known_bad_qubit:
      return "known_bad_qubit";
  }
  return "unknown";
}

CaseId case_from_number(int number) {
  if (number < 1 || number > 3) fail("case must be 1, 2 or 3, got " + std::to_string(number));
  return static_cast<CaseId>(number);
}

std::vector<double> default_epsilon_grid() { return {1e-3, 2e-3, 5e-3, 1e-2}; }

bool logical_failure(const codes::CssCode& code, const gf2::BitVector& e, const gf2::BitVector& c) {
  if (e.size() != code.n || c.size() != code.n) fail("error/correction length must equal n");
  const gf2::BitVector residual = e ^ c;
  if (!gf2::mat_vec(code.hz, residual).is_zero()) {
    fail("residual has a nonzero syndrome; the correction does not match the error's syndrome");
  }
  return overlap_parity(residual, code.logical_z);
}

ErrorCatalog::ErrorCatalog(const codes::CssCode& code, std::optional<std::size_t> max_weight)
    : code_(&code), max_weight_(max_weight) {
  if (code.n > 64 || code.hz.rows() > 64) fail("catalogue supports n <= 64 and <= 64 checks");
  if (!max_weight && code.n > kExactThreshold) {
    fail("exact enumeration needs n <= " + std::to_string(kExactThreshold) + " (got " +
         std::to_string(code.n) + "); use the weight-capped evaluation");
  }
  column_syndrome_.assign(code.n, 0);
  for (std::size_t q = 0; q < code.n; ++q) column_syndrome_[q] = to_mask(code.hz.column(q));
  logical_mask_ = to_mask(code.logical_z);

  const std::uint64_t count = noise::enumeration_count(code.n, max_weight);
  masks_.reserve(count);
  syndromes_.reserve(count);
  noise::for_each_error_mask(code.n, max_weight, [&](std::uint64_t mask) {
    std::uint64_t s = 0;
    for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
      s ^= column_syndrome_[static_cast<std::size_t>(std::countr_zero(bits))];
    }
    masks_.push_back(mask);
    syndromes_.push_back(s);
  });
}

ErrorCatalog::Evaluation ErrorCatalog::evaluate(const noise::ErrorModel& model,
                                                const bposd::PriorVector& priors,
                                                std::size_t max_iter, bool use_cache) const {
  const codes::CssCode& code = *code_;
  if (model.n != code.n || priors.size() != code.n) fail("model/prior length must equal n");
  const auto rates = noise::effective_rates(model);
  const noise::ProbabilityTable table(rates);
  const bposd::Decoder decoder(code.hz, max_iter);
  const std::size_t checks = code.hz.rows();

  Evaluation out;
  // Logical parity of the correction chosen for each syndrome: -1 = not yet decoded.
  auto decode_parity = [&](std::uint64_t syndrome) -> std::int8_t {
    ++out.decodes;
    const auto s = gf2::BitVector::from_mask(checks, syndrome);
    const auto result = decoder.decode(s, priors);
    if (to_mask(gf2::mat_vec(code.hz, result.correction)) != syndrome) {
      fail("decoder returned a correction with the wrong syndrome");
    }
    return static_cast<std::int8_t>(std::popcount(to_mask(result.correction) & logical_mask_) & 1);
  };

  std::vector<std::int8_t> dense;
  std::unordered_map<std::uint64_t, std::int8_t> sparse;
  const bool use_dense = checks <= kDenseSyndromeBits;
  if (use_cache && use_dense) dense.assign(std::size_t{1} << checks, -1);

  auto parity_for = [&](std::uint64_t syndrome) -> std::int8_t {
    if (!use_cache) return decode_parity(syndrome);
    if (use_dense) {
      std::int8_t& slot = dense[syndrome];
      if (slot < 0) {
        slot = decode_parity(syndrome);
      } else {
        ++out.cache_hits;
      }
      return slot;
    }
    auto [it, inserted] = sparse.try_emplace(syndrome, std::int8_t{-1});
    if (inserted) {
      it->second = decode_parity(syndrome);
    } else {
      ++out.cache_hits;
    }
    return it->second;
  };

  long double total = 0.0L;
  for (std::size_t i = 0; i < masks_.size(); ++i) {
    const double p = table.probability(masks_[i]);
    if (p == 0.0) continue;
    const std::int8_t correction_parity = parity_for(syndromes_[i]);
    const int error_parity = std::popcount(masks_[i] & logical_mask_) & 1;
    if ((error_parity ^ correction_parity) != 0) total += static_cast<long double>(p);
  }
  out.failure = total;
  return out;
}

FailureRecord evaluate_record(const ErrorCatalog& catalog, const noise::ErrorModel& model,
                              const bposd::PriorVector& priors, const std::string& label,
                              double epsilon, std::size_t max_iter) {
  const auto start = std::chrono::steady_clock::now();
  const auto eval = catalog.evaluate(model, priors, max_iter);
  FailureRecord rec;
  rec.code = catalog.code().name;
  rec.d = catalog.code().d;
  rec.case_name = label;
  rec.epsilon = epsilon;
  rec.failure_probability = static_cast<double>(eval.failure);
  rec.tail_bound = catalog.max_weight() ? noise::tail_probability(model, *catalog.max_weight()) : 0.0;
  rec.syndrome_cache_hits = eval.cache_hits;
  rec.decodes = eval.decodes;
  rec.wall_time = seconds_since(start);
  return rec;
}

FailureRecord exact_failure_probability(const codes::CssCode& code, const noise::ErrorModel& model,
                                        const bposd::PriorVector& priors, std::size_t max_iter) {
  const ErrorCatalog catalog(code, std::nullopt);
  return evaluate_record(catalog, model, priors, "custom", model.base_rate, max_iter);
}

FailureRecord capped_failure_probability(const codes::CssCode& code, const noise::ErrorModel& model,
                                         const bposd::PriorVector& priors, std::size_t max_weight,
                                         std::size_t max_iter) {
  const ErrorCatalog catalog(code, max_weight);
  return evaluate_record(catalog, model, priors, "custom", model.base_rate, max_iter);
}

std::pair<noise::ErrorModel, bposd::PriorVector> build_case(const codes::CssCode& code,
                                                            const CaseSpec& spec) {
  if (spec.bad_site >= code.n) fail("bad site " + std::to_string(spec.bad_site) + " >= n");
  auto model = noise::ErrorModel::iid(code.n, spec.epsilon);
  std::vector<double> priors(code.n, spec.epsilon);
  if (spec.id != CaseId::identical_qubits) model = model.with_override(spec.bad_site, spec.p_star);
  if (spec.id == CaseId::known_bad_qubit) priors[spec.bad_site] = spec.p_star;
  return {std::move(model), bposd::PriorVector(std::move(priors))};
}

FailureRecord run_case(const codes::CssCode& code, const CaseSpec& spec, std::size_t max_iter) {
  const auto [model, priors] = build_case(code, spec);
  const std::optional<std::size_t> cap =
      code.n <= kExactThreshold ? std::nullopt : std::optional<std::size_t>(kDefaultMaxWeight);
  const ErrorCatalog catalog(code, cap);
  return evaluate_record(catalog, model, priors, to_string(spec.id), spec.epsilon, max_iter);
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) fail("scaling fit needs at least two points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [eps, f] : points) {
    if (!(eps > 0.0) || !(f > 0.0)) fail("scaling fit needs positive ε and failure values");
    sx += std::log(eps);
    sy += std::log(f);
  }
  const double count = static_cast<double>(points.size());
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [eps, f] : points) {
    const double dx = std::log(eps) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(f) - my);
  }
  if (sxx == 0.0) fail("scaling fit needs at least two distinct ε values");
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double sse = 0.0;
  for (const auto& [eps, f] : points) {
    const double r = std::log(f) - (fit.intercept + fit.exponent * std::log(eps));
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / count);
  return fit;
}

std::vector<std::pair<double, double>> fit_points(std::span<const FailureRecord> records) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.emplace_back(r.epsilon, r.failure_probability);
  return pts;
}

SweepResult sweep(const codes::CssCode& code, const SweepOptions& options) {
  if (options.epsilons.empty()) fail("empty ε grid");
  const std::optional<std::size_t> cap =
      code.n <= kExactThreshold ? std::nullopt : std::optional<std::size_t>(options.max_weight);
  const ErrorCatalog catalog(code, cap);
  SweepResult out;
  for (CaseId id : options.cases) {
    std::vector<FailureRecord> rows;
    for (double eps : options.epsilons) {
      const CaseSpec spec{id, eps, options.p_star, options.bad_site};
      const auto [model, priors] = build_case(code, spec);
      rows.push_back(evaluate_record(catalog, model, priors, to_string(id), eps, options.max_iter));
    }
    if (rows.size() >= 2) {
      const auto pts = fit_points(rows);
      bool positive = true;
      for (const auto& [e, f] : pts) positive = positive && f > 0.0;
      if (positive) out.fits.push_back({id, fit_scaling(pts)});
    }
    out.records.insert(out.records.end(), rows.begin(), rows.end());
  }
  return out;
}

LemmaOutcome lemma_check_detailed(const codes::CssCode& code, const std::set<std::size_t>& known_sites,
                                  std::size_t n2, const bposd::PriorVector& priors,
                                  std::size_t max_iter) {
  if (known_sites.size() + 2 * n2 >= code.d) {
    fail("precondition |known| + 2·n2 < d violated (" + std::to_string(known_sites.size()) +
         " + 2·" + std::to_string(n2) + " >= " + std::to_string(code.d) + ")");
  }
  if (priors.size() != code.n) fail("prior length must equal n");
  for (std::size_t s : known_sites) {
    if (s >= code.n) fail("known site out of range");
  }
  if (code.n > 64) fail("lemma check supports n <= 64");

  std::vector<std::size_t> known(known_sites.begin(), known_sites.end());
  std::uint64_t known_mask = 0;
  for (std::size_t s : known) known_mask |= std::uint64_t{1} << s;
  std::vector<std::size_t> others;
  for (std::size_t q = 0; q < code.n; ++q) {
    if ((known_mask >> q & 1U) == 0) others.push_back(q);
  }

  const bposd::Decoder decoder(code.hz, max_iter);
  LemmaOutcome out;
  auto check = [&](std::uint64_t error_mask) {
    const auto e = gf2::BitVector::from_mask(code.n, error_mask);
    const auto result = decoder.decode(gf2::mat_vec(code.hz, e), priors);
    ++out.errors_checked;
    if (logical_failure(code, e, result.correction)) {
      out.holds = false;
      if (!out.counterexample) out.counterexample = e;
    }
  };

  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << known.size()); ++subset) {
    std::uint64_t base = 0;
    for (std::size_t j = 0; j < known.size(); ++j) {
      if ((subset >> j & 1U) != 0) base |= std::uint64_t{1} << known[j];
    }
    noise::for_each_error_mask(others.size(), n2, [&](std::uint64_t local) {
      std::uint64_t e = base;
      for (std::uint64_t bits = local; bits != 0; bits &= bits - 1) {
        e |= std::uint64_t{1} << others[static_cast<std::size_t>(std::countr_zero(bits))];
      }
      check(e);
    });
  }
  return out;
}

bool lemma_check(const codes::CssCode& code, const std::set<std::size_t>& known_sites,
                 std::size_t n2, const bposd::PriorVector& priors, std::size_t max_iter) {
  return lemma_check_detailed(code, known_sites, n2, priors, max_iter).holds;
}

}  // namespace qec::experiments
