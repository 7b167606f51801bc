#include "qec/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qec/error.hpp"

namespace qec::adaptive {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error("adaptive", what); }

std::size_t stride_for(std::size_t rounds) { return rounds <= kFullHistoryRounds ? 1 : 10; }

bool keep_snapshot(std::size_t round, std::size_t stride) { return round % stride == 0; }

std::optional<experiments::ScalingFit> try_fit(const std::vector<experiments::FailureRecord>& rows) {
  const auto pts = experiments::fit_points(rows);
  if (pts.size() < 2) return std::nullopt;
  for (const auto& [eps, f] : pts) {
    if (!(f > 0.0)) return std::nullopt;
  }
  return experiments::fit_scaling(pts);
}

}  // namespace

bposd::PriorVector kalman_update(const bposd::PriorVector& priors, std::span<const double> soft,
                                 double gain) {
  if (!(gain > 0.0 && gain <= 1.0)) fail("gain must lie in (0, 1], got " + std::to_string(gain));
  if (soft.size() != priors.size()) fail("soft output length does not match priors");
  std::vector<double> next(priors.size());
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const double b = soft[i];
    if (!(b >= 0.0 && b <= 1.0)) fail("soft output outside [0, 1]");
    next[i] = priors[i] + gain * (b - priors[i]);
  }
  return bposd::PriorVector(std::move(next));
}

LearningState LearningState::uniform(std::size_t n, double initial_prior, double gain,
                                     std::size_t planned_rounds) {
  LearningState state;
  state.priors = bposd::PriorVector::uniform(n, initial_prior);
  state.gain = gain;
  state.history_stride = stride_for(planned_rounds);
  state.history.push_back({0, std::vector<double>(state.priors.values().begin(),
                                                  state.priors.values().end())});
  return state;
}

RoundOutcome memory_round(const bposd::Decoder& decoder, std::span<const double> truth_rates,
                          LearningState& state, noise::Rng& rng) {
  const auto& hz = decoder.matrix();
  if (truth_rates.size() != hz.cols() || state.priors.size() != hz.cols()) {
    fail("truth/prior length does not match the code");
  }
  RoundOutcome out;
  out.error = noise::sample_error(truth_rates, rng);
  out.decode = decoder.decode(gf2::mat_vec(hz, out.error), state.priors);
  state.priors = kalman_update(state.priors, out.decode.soft, state.gain);
  ++state.round;
  if (keep_snapshot(state.round, state.history_stride)) {
    state.history.push_back({state.round, std::vector<double>(state.priors.values().begin(),
                                                              state.priors.values().end())});
  }
  return out;
}

RoundOutcome memory_round(const codes::CssCode& code, const noise::ErrorModel& truth,
                          LearningState& state, noise::Rng& rng) {
  const bposd::Decoder decoder(code.hz);
  const auto rates = noise::effective_rates(truth);
  return memory_round(decoder, rates, state, rng);
}

double median_prior_excluding(const bposd::PriorVector& priors, std::size_t target,
                              std::size_t partner) {
  std::vector<double> rest;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (i != target && i != partner) rest.push_back(priors[i]);
  }
  if (rest.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::ranges::sort(rest);
  const std::size_t mid = rest.size() / 2;
  return rest.size() % 2 == 1 ? rest[mid] : 0.5 * (rest[mid - 1] + rest[mid]);
}

double SoftStats::mean_on_correction() const {
  return count_on_correction == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : sum_on_correction / static_cast<double>(count_on_correction);
}

double SoftStats::mean_rounded_up() const {
  return count_rounded_up == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : sum_rounded_up / static_cast<double>(count_rounded_up);
}

LearningRun run_learning(const codes::CssCode& code, const noise::ErrorModel& truth, double gain,
                         std::size_t rounds, std::uint64_t seed, const LearningOptions& options) {
  if (rounds < 1) fail("learning needs at least one round");
  if (truth.n != code.n) fail("truth model size does not match the code");
  if (options.target >= code.n) fail("target site out of range");
  if (!(gain > 0.0 && gain <= 1.0)) fail("gain must lie in (0, 1]");

  const bposd::Decoder decoder(code.hz, options.max_iter);
  const auto rates = noise::effective_rates(truth);
  noise::Rng rng(seed);

  LearningRun run;
  run.seed = seed;
  run.partner = codes::stabilizer_partner(code, options.target);
  run.state = LearningState::uniform(code.n, options.initial_prior, gain, rounds);

  for (std::size_t t = 0; t < rounds; ++t) {
    const auto outcome = memory_round(decoder, rates, run.state, rng);
    for (std::size_t i = 0; i < code.n; ++i) {
      const double b = outcome.decode.soft[i];
      if (outcome.decode.correction.get(i)) {
        run.soft.sum_on_correction += b;
        ++run.soft.count_on_correction;
      }
      if (b > 0.5) {
        run.soft.sum_rounded_up += b;
        ++run.soft.count_rounded_up;
      }
    }
    if (keep_snapshot(run.state.round, run.state.history_stride)) {
      HistoryRow row;
      row.round = run.state.round;
      row.b = outcome.decode.correction.get(options.target) ? 1 : 0;
      row.prior_target = run.state.priors[options.target];
      row.prior_median_others = median_prior_excluding(run.state.priors, options.target, run.partner);
      run.rows.push_back(row);
    }
  }

  if (!options.run_sweeps) return run;

  const bposd::PriorVector& learned = run.state.priors;
  const double median = median_prior_excluding(learned, code.n, code.n);
  std::vector<bool> elevated(code.n, false);
  for (std::size_t i = 0; i < code.n; ++i) elevated[i] = learned[i] > options.elevated_factor * median;

  auto truth_at = [&](double eps) {
    noise::ErrorModel m = truth;
    m.base_rate = eps;
    return m;
  };
  run.before = experiments::sweep_family(
      code, options.sweep_epsilons, "initial_priors",
      [&](double eps) {
        return std::pair{truth_at(eps), bposd::PriorVector::uniform(code.n, eps)};
      },
      options.max_iter);
  run.after = experiments::sweep_family(
      code, options.sweep_epsilons, "learned_priors",
      [&](double eps) {
        std::vector<double> p(code.n, eps);
        for (std::size_t i = 0; i < code.n; ++i) {
          if (elevated[i]) p[i] = learned[i];
        }
        return std::pair{truth_at(eps), bposd::PriorVector(std::move(p))};
      },
      options.max_iter);
  for (auto& r : run.before) r.seed = seed;
  for (auto& r : run.after) r.seed = seed;
  run.fit_before = try_fit(run.before);
  run.fit_after = try_fit(run.after);
  return run;
}

double gate_flip_probability(double theta_tot) {
  const double s = std::sin(0.5 * theta_tot);
  return s * s;
}

double theta_update(double theta, int b, double theta_target, double gain_theta) {
  const double half = std::sin(0.5 * theta_target);
  const double sign = half > 0.0 ? 1.0 : (half < 0.0 ? -1.0 : 0.0);
  return theta - sign * std::abs(gain_theta) * (static_cast<double>(b) - gate_flip_probability(theta_target));
}

CalibrationState make_calibration_state(const codes::CssCode& code, double theta_initial,
                                        double theta_target, double theta0, double gain_theta,
                                        double gain, double initial_prior, std::size_t target_qubit,
                                        std::size_t planned_rounds) {
  if (!(theta_target > -std::numbers::pi && theta_target < std::numbers::pi)) {
    fail("theta_target must lie in (-pi, pi)");
  }
  if (target_qubit >= code.n) fail("target qubit out of range");
  CalibrationState state;
  state.theta = theta_initial;
  state.theta_target = theta_target;
  state.gain_theta = gain_theta;
  state.target_qubit = target_qubit;
  state.learning = LearningState::uniform(code.n, initial_prior, gain, planned_rounds);
  state.gate = SimulatedGate(theta0);
  return state;
}

CalibrationStep calibration_round(const bposd::Decoder& decoder, CalibrationState& state,
                                  std::span<const double> background_rates, noise::Rng& rng) {
  const auto& hz = decoder.matrix();
  const std::size_t target = state.target_qubit;
  if (background_rates.size() != hz.cols()) fail("background length does not match the code");
  if (background_rates[target] != 0.0) fail("background rate on the target qubit must be zero");

  CalibrationStep step;
  const double theta_used = state.theta;
  step.flipped_target = state.gate.apply(theta_used, rng);
  gf2::BitVector error = noise::sample_error(background_rates, rng);
  if (step.flipped_target) error.flip(target);

  step.decode = decoder.decode(gf2::mat_vec(hz, error), state.learning.priors);
  step.b = step.decode.correction.get(target) ? 1 : 0;
  state.theta = theta_update(state.theta, step.b, state.theta_target, state.gain_theta);

  LearningState& learning = state.learning;
  learning.priors = kalman_update(learning.priors, step.decode.soft, learning.gain);
  ++learning.round;
  if (keep_snapshot(learning.round, learning.history_stride)) {
    learning.history.push_back({learning.round, std::vector<double>(learning.priors.values().begin(),
                                                                    learning.priors.values().end())});
    HistoryRow row;
    row.round = learning.round;
    row.theta = theta_used;
    row.theta_tot = theta_used + state.gate.theta0();
    row.b = step.b;
    row.prior_target = learning.priors[target];
    row.prior_median_others = median_prior_excluding(learning.priors, target, hz.cols());
    state.history.push_back(row);
  }
  return step;
}

CalibrationStep calibration_round(const codes::CssCode& code, CalibrationState& state,
                                  const noise::ErrorModel& background, noise::Rng& rng) {
  const bposd::Decoder decoder(code.hz);
  const auto rates = noise::effective_rates(background);
  return calibration_round(decoder, state, rates, rng);
}

CalibrationRun run_calibration(const codes::CssCode& code, std::uint64_t seed,
                               const CalibrationOptions& options) {
  const std::size_t T = options.rounds;
  if (T < 1) fail("calibration needs at least one round");
  if (!(options.epsilon >= 0.0 && options.epsilon < 0.5)) fail("background ε must lie in [0, 0.5)");

  CalibrationRun run;
  run.seed = seed;
  run.state = make_calibration_state(code, options.theta_initial, options.theta_target,
                                     options.theta0, options.gain_theta, options.gain,
                                     options.epsilon, options.target_qubit, T);
  const bposd::Decoder decoder(code.hz, options.max_iter);
  const auto background = noise::effective_rates(
      noise::ErrorModel::iid(code.n, options.epsilon).with_override(options.target_qubit, 0.0));
  noise::Rng rng(seed);

  std::size_t w_begin = options.window_begin;
  std::size_t w_end = options.window_end == 0 ? T : std::min(options.window_end, T);
  if (options.window_begin == 0 && options.window_end == 0) w_begin = T - T / 4;
  std::size_t s_begin = options.sweep_window_begin;
  std::size_t s_end = options.sweep_window_end == 0 ? T : std::min(options.sweep_window_end, T);
  if (options.sweep_window_begin == 0 && options.sweep_window_end == 0) s_begin = T / 2;

  double flip_sum = 0.0;
  double b_sum = 0.0;
  std::size_t window_count = 0;
  double actual_sum = 0.0;
  std::size_t sweep_count = 0;
  double min_prior = std::numeric_limits<double>::infinity();

  for (std::size_t t = 0; t < T; ++t) {
    // Rounds are numbered from 1; round t + 1 applies θ_t.
    const double p_now = run.state.gate.flip_probability(run.state.theta);
    const auto step = calibration_round(decoder, run.state, background, rng);
    const std::size_t round = t + 1;
    if (round > w_begin && round <= w_end) {
      flip_sum += p_now;
      b_sum += step.b;
      ++window_count;
    }
    if (round > s_begin && round <= s_end) {
      actual_sum += p_now;
      ++sweep_count;
      min_prior = std::min(min_prior, run.state.learning.priors[options.target_qubit]);
    }
  }
  run.rows = run.state.history;
  if (window_count > 0) {
    run.window_mean_flip = flip_sum / static_cast<double>(window_count);
    run.window_mean_b = b_sum / static_cast<double>(window_count);
  }
  if (sweep_count > 0) {
    run.sweep_actual_rate = actual_sum / static_cast<double>(sweep_count);
    run.sweep_prior = min_prior;
  } else {
    run.sweep_actual_rate = run.state.gate.flip_probability(run.state.theta);
    run.sweep_prior = run.state.learning.priors[options.target_qubit];
  }

  if (!options.run_sweep) return run;
  run.sweep = experiments::sweep_family(
      code, options.sweep_epsilons, "post_calibration",
      [&](double eps) {
        auto model = noise::ErrorModel::iid(code.n, eps).with_override(options.target_qubit,
                                                                       run.sweep_actual_rate);
        std::vector<double> p(code.n, eps);
        p[options.target_qubit] = run.sweep_prior;
        return std::pair{std::move(model), bposd::PriorVector(std::move(p))};
      },
      options.max_iter);
  for (auto& r : run.sweep) r.seed = seed;
  run.fit = try_fit(run.sweep);
  return run;
}

}  // namespace qec::adaptive
