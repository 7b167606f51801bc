#pragma once
// Closed-loop protocols driven by decoder output.
//
// Prior learning: every round samples an error, decodes it with the live
// priors and moves each prior toward the decoder's soft output,
//     p_{t+1} = p_t + γ (b_t - p_t).
//
// Gate calibration: a single-qubit X rotation by θ_t + θ_0 on the target
// qubit flips it with probability sin²((θ_t + θ_0)/2). The controller only
// sees whether the decoded correction touches the target (b_t) and steps
//     θ_{t+1} = θ_t - sgn(sin(θ_target/2)) |γ_θ| (b_t - p_target),
// with p_target = sin²(θ_target/2). The offset θ_0 is known only to the
// simulated gate.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "qec/bposd.hpp"
#include "qec/codes.hpp"
#include "qec/experiments.hpp"
#include "qec/noise.hpp"

namespace qec::adaptive {

inline constexpr double kDefaultGain = 0.01;
inline constexpr double kDefaultThetaGain = 0.02;
inline constexpr double kDefaultBackground = 1e-3;
inline constexpr double kDefaultTheta0 = 0.3;
inline constexpr double kDefaultThetaTarget = std::numbers::pi / 3.0;
/// Full history up to this many rounds, stride 10 beyond.
inline constexpr std::size_t kFullHistoryRounds = 10'000;

bposd::PriorVector kalman_update(const bposd::PriorVector& priors, std::span<const double> soft,
                                 double gain);

struct PriorSnapshot {
  std::size_t round = 0;
  std::vector<double> priors;
};

struct LearningState {
  bposd::PriorVector priors;
  double gain = kDefaultGain;
  std::size_t round = 0;
  std::size_t history_stride = 1;
  std::vector<PriorSnapshot> history;

  static LearningState uniform(std::size_t n, double initial_prior, double gain,
                               std::size_t planned_rounds);
};

struct RoundOutcome {
  bposd::DecodeResult decode;
  gf2::BitVector error;
};

RoundOutcome memory_round(const bposd::Decoder& decoder, std::span<const double> truth_rates,
                          LearningState& state, noise::Rng& rng);
RoundOutcome memory_round(const codes::CssCode& code, const noise::ErrorModel& truth,
                          LearningState& state, noise::Rng& rng);

/// Per-round summary row shared by the learning and calibration histories.
/// theta / theta_tot are only set for calibration runs.
struct HistoryRow {
  std::size_t round = 0;
  std::optional<double> theta;
  std::optional<double> theta_tot;
  int b = 0;  // correction supported on the target qubit
  double prior_target = 0.0;
  double prior_median_others = 0.0;
};

/// Median prior over qubits other than `target` and its weight-2 partner.
double median_prior_excluding(const bposd::PriorVector& priors, std::size_t target,
                              std::size_t partner);

struct LearningOptions {
  double initial_prior = kDefaultBackground;
  std::size_t target = 0;  // site whose prior is tracked in the history
  std::vector<double> sweep_epsilons = experiments::default_epsilon_grid();
  bool run_sweeps = true;
  std::size_t max_iter = bposd::kDefaultMaxIter;
  /// A learned prior counts as elevated when it exceeds this multiple of the
  /// median prior; elevated sites keep their learned value in the sweeps.
  double elevated_factor = 10.0;
};

struct SoftStats {
  double sum_on_correction = 0.0;  // soft value wherever the correction bit is 1
  std::uint64_t count_on_correction = 0;
  double sum_rounded_up = 0.0;     // soft values above 1/2
  std::uint64_t count_rounded_up = 0;

  double mean_on_correction() const;
  double mean_rounded_up() const;
};

struct LearningRun {
  std::uint64_t seed = 0;
  LearningState state;
  std::vector<HistoryRow> rows;
  SoftStats soft;
  std::size_t partner = 0;  // == n when the target has none
  std::vector<experiments::FailureRecord> before;
  std::vector<experiments::FailureRecord> after;
  std::optional<experiments::ScalingFit> fit_before;
  std::optional<experiments::ScalingFit> fit_after;
};

/// T memory rounds from uniform priors, then failure sweeps over ε with the
/// initial priors and with the learned priors. The sweep truth keeps the
/// truth model's overrides and sets every other site to ε.
LearningRun run_learning(const codes::CssCode& code, const noise::ErrorModel& truth, double gain,
                         std::size_t rounds, std::uint64_t seed, const LearningOptions& options = {});

double gate_flip_probability(double theta_tot);

/// The physical gate. Holds the hidden offset; the controller never reads it.
class SimulatedGate {
 public:
  explicit SimulatedGate(double theta0) : theta0_(theta0) {}
  double flip_probability(double theta) const { return gate_flip_probability(theta + theta0_); }
  bool apply(double theta, noise::Rng& rng) const { return rng.bernoulli(flip_probability(theta)); }
  /// Simulation-side bookkeeping only (history, diagnostics).
  double theta0() const noexcept { return theta0_; }

 private:
  double theta0_;
};

/// One controller step; a function of observable quantities only.
double theta_update(double theta, int b, double theta_target, double gain_theta);

struct CalibrationState {
  double theta = 0.0;
  double theta_target = kDefaultThetaTarget;
  double gain_theta = kDefaultThetaGain;
  std::size_t target_qubit = 0;
  LearningState learning;
  SimulatedGate gate{kDefaultTheta0};
  std::vector<HistoryRow> history;

  double p_target() const { return gate_flip_probability(theta_target); }
};

CalibrationState make_calibration_state(const codes::CssCode& code, double theta_initial,
                                        double theta_target, double theta0, double gain_theta,
                                        double gain, double initial_prior, std::size_t target_qubit,
                                        std::size_t planned_rounds);

struct CalibrationStep {
  bool flipped_target = false;
  int b = 0;
  bposd::DecodeResult decode;
};

/// Background rates must be zero on the target qubit; the gate supplies that
/// channel.
CalibrationStep calibration_round(const bposd::Decoder& decoder, CalibrationState& state,
                                  std::span<const double> background_rates, noise::Rng& rng);
CalibrationStep calibration_round(const codes::CssCode& code, CalibrationState& state,
                                  const noise::ErrorModel& background, noise::Rng& rng);

struct CalibrationOptions {
  double theta_target = kDefaultThetaTarget;
  double theta0 = kDefaultTheta0;
  double theta_initial = 0.0;
  double gain_theta = kDefaultThetaGain;
  double gain = kDefaultGain;
  double epsilon = kDefaultBackground;
  std::size_t rounds = 4000;
  std::size_t target_qubit = 0;
  /// [begin, end) rounds for the convergence statistic; end = 0 means T.
  /// begin = 0 with end = 0 selects the last quarter.
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
  /// [begin, end) rounds scanned for the worst-case learned prior used in
  /// the post-calibration sweep; defaults to the second half.
  std::size_t sweep_window_begin = 0;
  std::size_t sweep_window_end = 0;
  std::vector<double> sweep_epsilons = experiments::default_epsilon_grid();
  bool run_sweep = true;
  std::size_t max_iter = bposd::kDefaultMaxIter;
};

struct CalibrationRun {
  std::uint64_t seed = 0;
  CalibrationState state;
  std::vector<HistoryRow> rows;
  double window_mean_flip = 0.0;   // mean sin²(θ_tot/2) over the convergence window
  double window_mean_b = 0.0;
  double sweep_actual_rate = 0.0;  // target flip rate used in the sweep
  double sweep_prior = 0.0;        // worst-case learned target prior
  std::vector<experiments::FailureRecord> sweep;
  std::optional<experiments::ScalingFit> fit;
};

CalibrationRun run_calibration(const codes::CssCode& code, std::uint64_t seed,
                               const CalibrationOptions& options = {});

}  // namespace qec::adaptive
