#pragma once
// Logical failure probabilities of BPOSD on surface codes under a single
// high-error qubit, by exhaustive or weight-capped enumeration of errors.
//
// Three noise/prior pairings are compared:
//   identical_qubits   iid noise at ε, decoder priors iid ε
//   unknown_bad_qubit  bad site flips at p_*, decoder priors still iid ε
//   known_bad_qubit    bad site flips at p_*, decoder priors carry p_* too

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qec/bposd.hpp"
#include "qec/codes.hpp"
#include "qec/noise.hpp"

namespace qec::experiments {

enum class CaseId { identical_qubits = 1, unknown_bad_qubit = 2, known_bad_qubit = 3 };

std::string to_string(CaseId id);
CaseId case_from_number(int number);

struct CaseSpec {
  CaseId id = CaseId::identical_qubits;
  double epsilon = 1e-3;
  double p_star = 1.0 / 3.0;
  std::size_t bad_site = 0;
};

struct FailureRecord {
  std::string code;
  std::size_t d = 0;
  std::string case_name;
  double epsilon = 0.0;
  double failure_probability = 0.0;
  double tail_bound = 0.0;
  std::uint64_t syndrome_cache_hits = 0;
  std::uint64_t decodes = 0;
  double wall_time = 0.0;  // seconds
  std::uint64_t seed = 0;
};

/// Default ε grid for scaling fits.
std::vector<double> default_epsilon_grid();

/// Codes with at most this many qubits are enumerated exhaustively.
inline constexpr std::size_t kExactThreshold = 20;
inline constexpr std::size_t kDefaultMaxWeight = 6;

/// True iff the residual e ⊕ c flips the logical Z eigenvalue. Throws when
/// the residual has a nonzero syndrome.
bool logical_failure(const codes::CssCode& code, const gf2::BitVector& e, const gf2::BitVector& c);

/// Every error of weight ≤ max_weight on a code, with its syndrome and its
/// logical parity. Built once per code, reused across models and priors.
class ErrorCatalog {
 public:
  ErrorCatalog(const codes::CssCode& code, std::optional<std::size_t> max_weight);

  const codes::CssCode& code() const noexcept { return *code_; }
  std::optional<std::size_t> max_weight() const noexcept { return max_weight_; }
  std::size_t size() const noexcept { return masks_.size(); }

  struct Evaluation {
    long double failure = 0.0L;
    std::uint64_t cache_hits = 0;
    std::uint64_t decodes = 0;
  };

  /// Sums P(e) over catalogued errors whose decoded correction leaves a
  /// logical flip. With use_cache, each distinct syndrome is decoded once.
  Evaluation evaluate(const noise::ErrorModel& model, const bposd::PriorVector& priors,
                      std::size_t max_iter = bposd::kDefaultMaxIter, bool use_cache = true) const;

 private:
  const codes::CssCode* code_;
  std::optional<std::size_t> max_weight_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> syndromes_;
  std::vector<std::uint64_t> column_syndrome_;
  std::uint64_t logical_mask_ = 0;
};

FailureRecord exact_failure_probability(const codes::CssCode& code, const noise::ErrorModel& model,
                                        const bposd::PriorVector& priors,
                                        std::size_t max_iter = bposd::kDefaultMaxIter);

FailureRecord capped_failure_probability(const codes::CssCode& code, const noise::ErrorModel& model,
                                         const bposd::PriorVector& priors,
                                         std::size_t max_weight = kDefaultMaxWeight,
                                         std::size_t max_iter = bposd::kDefaultMaxIter);

/// (truth model, decoder priors) for a case.
std::pair<noise::ErrorModel, bposd::PriorVector> build_case(const codes::CssCode& code,
                                                            const CaseSpec& spec);

FailureRecord run_case(const codes::CssCode& code, const CaseSpec& spec,
                       std::size_t max_iter = bposd::kDefaultMaxIter);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
};

/// Least-squares line through (log ε, log f).
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

struct SweepOptions {
  std::vector<CaseId> cases{CaseId::identical_qubits, CaseId::unknown_bad_qubit,
                            CaseId::known_bad_qubit};
  std::vector<double> epsilons = default_epsilon_grid();
  double p_star = 1.0 / 3.0;
  std::size_t bad_site = 0;
  std::size_t max_weight = kDefaultMaxWeight;
  std::size_t max_iter = bposd::kDefaultMaxIter;
};

struct CaseFit {
  CaseId id;
  ScalingFit fit;
};

struct SweepResult {
  std::vector<FailureRecord> records;  // case-major, ε-minor
  std::vector<CaseFit> fits;
};

/// All cases over the ε grid, sharing one error catalogue.
SweepResult sweep(const codes::CssCode& code, const SweepOptions& options);

/// Failure probabilities over an ε grid for an arbitrary (model, priors)
/// family, e.g. learned priors. `make` maps ε to the pair to evaluate.
template <typename MakePair>
std::vector<FailureRecord> sweep_family(const codes::CssCode& code, std::span<const double> epsilons,
                                        const std::string& label, MakePair make,
                                        std::size_t max_iter = bposd::kDefaultMaxIter);

struct LemmaOutcome {
  bool holds = true;
  std::uint64_t errors_checked = 0;
  std::optional<gf2::BitVector> counterexample;
};

/// Exhaustively decodes every error with arbitrary support on the known
/// sites plus at most n2 flips elsewhere. Requires |known| + 2·n2 < d.
LemmaOutcome lemma_check_detailed(const codes::CssCode& code, const std::set<std::size_t>& known_sites,
                                  std::size_t n2, const bposd::PriorVector& priors,
                                  std::size_t max_iter = bposd::kDefaultMaxIter);

bool lemma_check(const codes::CssCode& code, const std::set<std::size_t>& known_sites,
                 std::size_t n2, const bposd::PriorVector& priors,
                 std::size_t max_iter = bposd::kDefaultMaxIter);

// ---------------------------------------------------------------------------

FailureRecord evaluate_record(const ErrorCatalog& catalog, const noise::ErrorModel& model,
                              const bposd::PriorVector& priors, const std::string& label,
                              double epsilon, std::size_t max_iter);

template <typename MakePair>
std::vector<FailureRecord> sweep_family(const codes::CssCode& code, std::span<const double> epsilons,
                                        const std::string& label, MakePair make,
                                        std::size_t max_iter) {
  const std::optional<std::size_t> cap =
      code.n <= kExactThreshold ? std::nullopt : std::optional<std::size_t>(kDefaultMaxWeight);
  const ErrorCatalog catalog(code, cap);
  std::vector<FailureRecord> out;
  for (double eps : epsilons) {
    const auto [model, priors] = make(eps);
    out.push_back(evaluate_record(catalog, model, priors, label, eps, max_iter));
  }
  return out;
}

/// (ε, failure) pairs of a record list, for fit_scaling.
std::vector<std::pair<double, double>> fit_points(std::span<const FailureRecord> records);

}  // namespace qec::experiments
