#pragma once
// CSV and JSON-lines emission for experiment and history records.
//
// Numbers are written in the shortest decimal form that round-trips to the
// same double, so files are byte-stable across runs with the same config.

#include <ostream>
#include <span>
#include <string>

#include "qec/adaptive.hpp"
#include "qec/experiments.hpp"

namespace qec::records {

enum class Format { csv, jsonl };

Format format_from_string(const std::string& name);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

inline constexpr const char* kFailureCsvHeader = "code,d,case,epsilon,failure,tail,seed";
inline constexpr const char* kHistoryCsvHeader =
    "round,theta,theta_tot,b_t,prior_target,prior_median_others";
inline constexpr const char* kFitCsvHeader = "code,d,case,exponent,intercept,residual,seed";

void write_failure_csv(std::ostream& out, std::span<const experiments::FailureRecord> rows);
void write_failure_jsonl(std::ostream& out, std::span<const experiments::FailureRecord> rows);

struct FitRow {
  std::string code;
  std::size_t d = 0;
  std::string case_name;
  experiments::ScalingFit fit;
  std::uint64_t seed = 0;
};

void write_fit_csv(std::ostream& out, std::span<const FitRow> rows);
void write_fit_jsonl(std::ostream& out, std::span<const FitRow> rows);

void write_history_csv(std::ostream& out, std::span<const adaptive::HistoryRow> rows);
void write_history_jsonl(std::ostream& out, std::span<const adaptive::HistoryRow> rows);

}  // namespace qec::records
