#include "qec/records.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

#include "qec/error.hpp"

namespace qec::records {

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

// Non-finite values become null in JSON.
nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  throw Error("records", "unknown output format '" + name + "' (expected csv or jsonl)");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_failure_csv(std::ostream& out, std::span<const experiments::FailureRecord> rows) {
  out << kFailureCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.code << ',' << r.d << ',' << r.case_name << ',' << format_double(r.epsilon) << ','
        << format_double(r.failure_probability) << ',' << format_double(r.tail_bound) << ','
        << r.seed << '\n';
  }
}

void write_failure_jsonl(std::ostream& out, std::span<const experiments::FailureRecord> rows) {
  for (const auto& r : rows) {
    nlohmann::json j{{"code", r.code},
                     {"d", r.d},
                     {"case", r.case_name},
                     {"epsilon", json_number(r.epsilon)},
                     {"failure", json_number(r.failure_probability)},
                     {"tail", json_number(r.tail_bound)},
                     {"syndrome_cache_hits", r.syndrome_cache_hits},
                     {"decodes", r.decodes},
                     {"wall_time", json_number(r.wall_time)},
                     {"seed", r.seed}};
    out << j.dump() << '\n';
  }
}

void write_fit_csv(std::ostream& out, std::span<const FitRow> rows) {
  out << kFitCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.code << ',' << r.d << ',' << r.case_name << ',' << format_double(r.fit.exponent) << ','
        << format_double(r.fit.intercept) << ',' << format_double(r.fit.residual) << ',' << r.seed
        << '\n';
  }
}

void write_fit_jsonl(std::ostream& out, std::span<const FitRow> rows) {
  for (const auto& r : rows) {
    nlohmann::json j{{"record", "fit"},
                     {"code", r.code},
                     {"d", r.d},
                     {"case", r.case_name},
                     {"exponent", json_number(r.fit.exponent)},
                     {"intercept", json_number(r.fit.intercept)},
                     {"residual", json_number(r.fit.residual)},
                     {"seed", r.seed}};
    out << j.dump() << '\n';
  }
}

void write_history_csv(std::ostream& out, std::span<const adaptive::HistoryRow> rows) {
  out << kHistoryCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.round << ',' << optional_number(r.theta) << ',' << optional_number(r.theta_tot) << ','
        << r.b << ',' << format_double(r.prior_target) << ',' << format_double(r.prior_median_others)
        << '\n';
  }
}

void write_history_jsonl(std::ostream& out, std::span<const adaptive::HistoryRow> rows) {
  for (const auto& r : rows) {
    nlohmann::json j{{"round", r.round},
                     {"theta", r.theta ? json_number(*r.theta) : nlohmann::json(nullptr)},
                     {"theta_tot", r.theta_tot ? json_number(*r.theta_tot) : nlohmann::json(nullptr)},
                     {"b_t", r.b},
                     {"prior_target", json_number(r.prior_target)},
                     {"prior_median_others", json_number(r.prior_median_others)}};
    out << j.dump() << '\n';
  }
}

}  // namespace qec::records
