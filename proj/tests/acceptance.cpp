// Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails. `acceptance N` runs criterion N only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qec/adaptive.hpp"
#include "qec/experiments.hpp"
#include "qec/noise.hpp"

using namespace qec;
using bposd::PriorVector;
using experiments::CaseId;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

const experiments::ScalingFit& fit_for(const experiments::SweepResult& r, CaseId id) {
  for (const auto& f : r.fits) {
    if (f.id == id) return f.fit;
  }
  std::abort();
}

std::vector<const experiments::FailureRecord*> records_for(const experiments::SweepResult& r,
                                                           CaseId id) {
  std::vector<const experiments::FailureRecord*> out;
  for (const auto& rec : r.records) {
    if (rec.case_name == experiments::to_string(id)) out.push_back(&rec);
  }
  return out;
}

Outcome exponent_separation() {
  Clock clock;
  const auto code = codes::rotated_surface(4);
  const auto r = experiments::sweep(code, {});
  const double s1 = fit_for(r, CaseId::identical_qubits).exponent;
  const double s2 = fit_for(r, CaseId::unknown_bad_qubit).exponent;
  const double s3 = fit_for(r, CaseId::known_bad_qubit).exponent;
  const auto c1 = records_for(r, CaseId::identical_qubits);
  const auto c3 = records_for(r, CaseId::known_bad_qubit);
  double worst_ratio = 1.0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const double a = c1[i]->failure_probability;
    const double b = c3[i]->failure_probability;
    worst_ratio = std::max(worst_ratio, std::max(a / b, b / a));
  }
  const double t = clock.seconds();
  Outcome o;
  o.pass = within(s1, 2.0, 0.25) && within(s2, 1.0, 0.25) && within(s3, 2.0, 0.25) &&
           worst_ratio <= 3.0 && t < 120.0;
  o.detail = "d=4 slopes case1=" + fmt(s1) + " case2=" + fmt(s2) + " case3=" + fmt(s3) +
             ", max case3/case1 ratio=" + fmt(worst_ratio) + ", " + fmt(t, 3) + " s";
  return o;
}

Outcome odd_distance_control() {
  const auto code = codes::rotated_surface(3);
  experiments::SweepOptions opts;
  opts.cases = {CaseId::known_bad_qubit};
  const auto r = experiments::sweep(code, opts);
  const double s3 = fit_for(r, CaseId::known_bad_qubit).exponent;
  return {within(s3, 1.0, 0.25), "d=3 case3 slope=" + fmt(s3)};
}

Outcome capped_scaling() {
  Clock clock;
  experiments::SweepOptions opts;
  opts.cases = {CaseId::known_bad_qubit};
  opts.max_weight = 6;
  Outcome o;
  for (auto [d, target] : {std::pair<std::size_t, double>{5, 2.0}, {6, 3.0}}) {
    const auto code = codes::rotated_surface(d);
    const auto r = experiments::sweep(code, opts);
    const double s = fit_for(r, CaseId::known_bad_qubit).exponent;
    double worst_tail = 0.0;
    for (const auto& rec : r.records) {
      worst_tail = std::max(worst_tail, rec.tail_bound / rec.failure_probability);
    }
    o.pass = o.pass && within(s, target, 0.3) && worst_tail < 0.1;
    o.detail += "d=" + std::to_string(d) + " case3 slope=" + fmt(s) +
                " max tail/failure=" + fmt(worst_tail, 3) + "; ";
  }
  const double t = clock.seconds();
  o.pass = o.pass && t < 1800.0;
  o.detail += fmt(t, 3) + " s";
  return o;
}

Outcome lemma_property() {
  const auto code = codes::rotated_surface(4);
  std::vector<double> p(code.n, 1e-3);
  p[0] = 1.0 / 3.0;
  const auto informed = experiments::lemma_check_detailed(code, {0}, 1, PriorVector(p));
  const auto blind =
      experiments::lemma_check_detailed(code, {0}, 1, PriorVector::uniform(code.n, 1e-3));
  std::string detail = "informed priors hold=" + std::string(informed.holds ? "yes" : "no") +
                       " over " + std::to_string(informed.errors_checked) +
                       " errors; uniform priors hold=" + (blind.holds ? "yes" : "no");
  if (blind.counterexample) detail += " (counterexample " + blind.counterexample->to_string() + ")";
  return {informed.holds && !blind.holds, detail};
}

struct LearningSummary {
  Outcome learning;
  Outcome soft;
};

LearningSummary prior_learning() {
  Clock clock;
  const auto code = codes::rotated_surface(4);
  const auto truth = noise::ErrorModel::iid(code.n, 1e-3).with_override(0, 1.0 / 3.0);
  LearningSummary out;
  double soft_sum = 0.0;
  std::uint64_t soft_count = 0;
  double rounded_sum = 0.0;
  std::uint64_t rounded_count = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto run = adaptive::run_learning(code, truth, 0.01, 2000, seed);
    const auto& p = run.state.priors;
    const double median = adaptive::median_prior_excluding(p, 0, run.partner);
    const double before = run.fit_before ? run.fit_before->exponent : std::nan("");
    const double after = run.fit_after ? run.fit_after->exponent : std::nan("");
    const bool ok = p[0] >= 0.15 && p[0] >= 5 * median && p[run.partner] > median &&
                    within(after, 2.0, 0.3) && within(before, 1.0, 0.3);
    out.learning.pass = out.learning.pass && ok;
    out.learning.detail += "seed " + std::to_string(seed) + ": p0=" + fmt(p[0], 3) +
                           " partner=" + fmt(p[run.partner], 3) + " median=" + fmt(median, 3) +
                           " slope " + fmt(before, 3) + "->" + fmt(after, 3) + "; ";
    soft_sum += run.soft.sum_on_correction;
    soft_count += run.soft.count_on_correction;
    rounded_sum += run.soft.sum_rounded_up;
    rounded_count += run.soft.count_rounded_up;
  }
  out.learning.pass = out.learning.pass && clock.seconds() < 300.0;
  out.learning.detail += fmt(clock.seconds(), 3) + " s";

  const double mean_on_correction = soft_sum / static_cast<double>(soft_count);
  const double mean_rounded = rounded_sum / static_cast<double>(rounded_count);
  out.soft.pass = within(mean_on_correction, 0.7, 0.15);
  out.soft.detail = "mean soft value where the correction bit is 1 = " + fmt(mean_on_correction) +
                    " over " + std::to_string(soft_count) +
                    " bits (mean of soft values above 1/2 = " + fmt(mean_rounded) + ")";
  return out;
}

Outcome calibration() {
  Clock clock;
  const auto code = codes::unrotated_surface(4);
  adaptive::CalibrationOptions opts;
  opts.theta_target = std::numbers::pi / 3;
  opts.theta0 = 0.3;
  opts.gain_theta = 0.02;
  opts.gain = 0.01;
  opts.epsilon = 1e-3;
  opts.rounds = 4000;
  opts.window_begin = 3000;
  opts.window_end = 4000;
  Outcome o;
  const double p_target = adaptive::gate_flip_probability(opts.theta_target);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto run = adaptive::run_calibration(code, seed, opts);
    const double slope = run.fit ? run.fit->exponent : std::nan("");
    o.pass = o.pass && within(run.window_mean_flip, p_target, 0.05) && within(slope, 2.0, 0.3);
    o.detail += "seed " + std::to_string(seed) + ": window mean=" + fmt(run.window_mean_flip, 3) +
                " slope=" + fmt(slope, 3) + "; ";
  }
  o.pass = o.pass && clock.seconds() < 600.0;
  o.detail += fmt(clock.seconds(), 3) + " s";
  return o;
}

Outcome decoder_contract() {
  std::uint64_t decodes = 0;
  std::uint64_t violations = 0;
  for (auto family : {codes::Family::rotated, codes::Family::unrotated}) {
    for (std::size_t d = 2; d <= 4; ++d) {
      const auto code = codes::make_surface(family, d);
      const std::size_t m = code.hz.rows();
      std::vector<double> bad(code.n, 1e-3);
      bad[0] = 1.0 / 3.0;
      const bposd::Decoder dec(code.hz);
      for (const auto& priors : {PriorVector::uniform(code.n, 1e-3), PriorVector(bad)}) {
        for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << m); ++sm) {
          const auto s = gf2::BitVector::from_mask(m, sm);
          const auto a = dec.decode(s, priors);
          const auto b = dec.decode(s, priors);
          decodes += 2;
          if (!(gf2::mat_vec(code.hz, a.correction) == s)) ++violations;
          if (!(a.correction == b.correction) || a.soft != b.soft) ++violations;
        }
      }
    }
  }
  std::size_t tie_checks = 0;
  std::size_t tie_violations = 0;
  for (std::size_t d = 3; d <= 4; ++d) {
    const auto code = codes::rotated_surface(d);
    const std::size_t partner = codes::stabilizer_partner(code, 0);
    const auto s = gf2::mat_vec(code.hz, gf2::BitVector::from_indices(code.n, {0}));
    for (std::size_t raised : {std::size_t{0}, partner}) {
      std::vector<double> p(code.n, 1e-3);
      p[raised] = 1e-2;
      const auto r = bposd::decode(code.hz, s, PriorVector(p));
      ++tie_checks;
      if (!(r.correction == gf2::BitVector::from_indices(code.n, {raised}))) ++tie_violations;
    }
  }
  return {violations == 0 && tie_violations == 0,
          std::to_string(decodes) + " decodes, " + std::to_string(violations) +
              " contract violations; tie-break " + std::to_string(tie_checks - tie_violations) + "/" +
              std::to_string(tie_checks)};
}

Outcome oracle_equivalences() {
  Outcome o;
  for (auto family : {codes::Family::rotated, codes::Family::unrotated}) {
    for (std::size_t d = 3; d <= 4; ++d) {
      const auto code = codes::make_surface(family, d);
      const std::size_t w = codes::min_logical_weight(code);
      o.pass = o.pass && w == d;
      o.detail += code.name + " mlw=" + std::to_string(w) + "; ";
    }
  }
  bool identical = true;
  for (auto family : {codes::Family::rotated, codes::Family::unrotated}) {
    const auto code = codes::make_surface(family, 3);
    for (auto id : {CaseId::identical_qubits, CaseId::unknown_bad_qubit, CaseId::known_bad_qubit}) {
      for (double eps : experiments::default_epsilon_grid()) {
        const auto [model, priors] = experiments::build_case(code, {id, eps});
        const auto exact = experiments::exact_failure_probability(code, model, priors);
        const auto capped = experiments::capped_failure_probability(code, model, priors, code.n);
        identical = identical && exact.failure_probability == capped.failure_probability;
      }
    }
  }
  o.pass = o.pass && identical;
  o.detail += std::string("capped(cap=n) == exact: ") + (identical ? "yes" : "no") + "; ";

  double worst = 0.0;
  for (std::size_t n : {9, 13, 16}) {
    std::vector<double> rates(n, 1e-2);
    rates[0] = 1.0 / 3.0;
    const noise::ProbabilityTable table(rates);
    long double sum = 0.0L;
    noise::for_each_error_mask(n, std::nullopt, [&](std::uint64_t m) { sum += table.probability(m); });
    worst = std::max(worst, std::abs(static_cast<double>(sum) - 1.0));
  }
  o.pass = o.pass && worst <= 1e-12;
  o.detail += "max |sum P(e) - 1| = " + fmt(worst, 3);
  return o;
}

void report(int id, const std::string& name, const Outcome& o, bool& all) {
  std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  auto selected = [&](int id) { return only == 0 || only == id; };
  bool all = true;
  if (selected(1)) report(1, "exponent separation at d=4", exponent_separation(), all);
  if (selected(2)) report(2, "d=3 control", odd_distance_control(), all);
  if (selected(3)) report(3, "weight-capped scaling at d=5,6", capped_scaling(), all);
  if (selected(4)) report(4, "lemma property", lemma_property(), all);
  if (selected(5) || selected(6)) {
    const auto s = prior_learning();
    if (selected(5)) report(5, "prior learning", s.learning, all);
    if (selected(6)) report(6, "soft-output level", s.soft, all);
  }
  if (selected(7)) report(7, "calibration convergence", calibration(), all);
  if (selected(8)) report(8, "decoder contract", decoder_contract(), all);
  if (selected(9)) report(9, "oracle equivalences", oracle_equivalences(), all);
  return all ? 0 : 1;
}
