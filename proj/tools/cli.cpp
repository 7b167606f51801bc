#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qec/adaptive.hpp"
#include "qec/error.hpp"
#include "qec/experiments.hpp"

namespace qec::cli {

namespace {

using nlohmann::ordered_json;

const std::map<std::string, Command> kCommands{{"code-info", Command::code_info},
                                               {"sweep", Command::sweep},
                                               {"learn", Command::learn},
                                               {"calibrate", Command::calibrate},
                                               {"lemma", Command::lemma}};

// Reads a flat JSON object as CLI11 config items. Arrays become repeated
// inputs; scalars are passed through as their text form.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_text(key, v));
      } else {
        item.inputs.push_back(scalar_text(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar_text(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config key '" + key + "' must be a scalar or an array of scalars");
  }
};

void check_probability_open(double v, const std::string& what) {
  if (!(v > 0.0 && v < 0.5)) {
    throw UsageError{what + " must lie in (0, 0.5), got " + records::format_double(v)};
  }
}

void validate(const RunConfig& c) {
  if (c.d < 2) throw UsageError{"--d must be at least 2, got " + std::to_string(c.d)};
  for (double e : c.epsilons) check_probability_open(e, "--eps value");
  check_probability_open(c.epsilon, "--epsilon");
  if (c.epsilons.empty()) throw UsageError{"--eps needs at least one value"};
  if (!(c.p_star > 0.0 && c.p_star < 1.0)) throw UsageError{"--p-star must lie in (0, 1)"};
  if (c.prior_known && !(*c.prior_known > 0.0 && *c.prior_known < 1.0)) {
    throw UsageError{"--prior-known must lie in (0, 1)"};
  }
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw UsageError{"--gamma must lie in (0, 1]"};
  if (!(c.gamma_theta > 0.0)) throw UsageError{"--gamma-theta must be positive"};
  for (int id : c.cases) {
    if (id < 1 || id > 3) throw UsageError{"--cases entries must be 1, 2 or 3"};
  }
  if (c.rounds < 1) throw UsageError{"--rounds must be at least 1"};
  if (c.max_iter < 1) throw UsageError{"--max-iter must be at least 1"};

  const auto code = codes::make_surface(c.family, c.d);
  auto check_index = [&](std::size_t i, const std::string& what) {
    if (i >= code.n) {
      throw UsageError{what + " " + std::to_string(i) + " is out of range for " + code.name +
                       " (n = " + std::to_string(code.n) + ")"};
    }
  };
  check_index(c.bad_site, "--bad-site");
  for (std::size_t s : c.known_sites) check_index(s, "--known-sites entry");
}

std::string extension(records::Format f) { return f == records::Format::csv ? ".csv" : ".jsonl"; }

// One output stream (file or the caller's stream) with its provenance header.
class Section {
 public:
  Section(const RunConfig& config, std::ostream& fallback, const std::string& suffix,
          const std::string& kind)
      : format_(config.format) {
    if (config.out.empty()) {
      stream_ = &fallback;
    } else {
      const std::string path = suffix.empty() ? config.out : config.out + suffix + extension(format_);
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cli", "cannot open output file '" + path + "'");
      stream_ = &file_;
    }
    ordered_json cfg = ordered_json::parse(config_json(config));
    if (format_ == records::Format::csv) {
      *stream_ << "# version " << QEC_VERSION << '\n'
               << "# record " << kind << '\n'
               << "# config " << cfg.dump() << '\n';
    } else {
      ordered_json header{{"record", "header"}, {"kind", kind}, {"version", QEC_VERSION},
                          {"config", cfg}};
      *stream_ << header.dump() << '\n';
    }
  }

  std::ostream& stream() { return *stream_; }
  records::Format format() const { return format_; }

 private:
  records::Format format_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

void emit_failures(Section& s, const std::vector<experiments::FailureRecord>& rows) {
  if (s.format() == records::Format::csv) {
    records::write_failure_csv(s.stream(), rows);
  } else {
    records::write_failure_jsonl(s.stream(), rows);
  }
}

void emit_fits(Section& s, const std::vector<records::FitRow>& rows) {
  if (s.format() == records::Format::csv) {
    records::write_fit_csv(s.stream(), rows);
  } else {
    records::write_fit_jsonl(s.stream(), rows);
  }
}

void emit_history(Section& s, const std::vector<adaptive::HistoryRow>& rows) {
  if (s.format() == records::Format::csv) {
    records::write_history_csv(s.stream(), rows);
  } else {
    records::write_history_jsonl(s.stream(), rows);
  }
}

void warn_high_prior(double p, const std::string& what, std::ostream& err) {
  if (p >= 0.5) {
    err << "warning: " << what << " = " << records::format_double(p)
        << " >= 0.5; BPOSD degrades as priors approach 1/2\n";
  }
}

int run_code_info(const RunConfig& c, std::ostream& out) {
  const auto code = codes::make_surface(c.family, c.d);
  ordered_json j;
  j["code"] = code.name;
  j["family"] = codes::to_string(code.family);
  j["n"] = code.n;
  j["k"] = code.k;
  j["d"] = code.d;
  auto histogram = [](const gf2::BitMatrix& h) {
    ordered_json hist = ordered_json::object();
    for (const auto& [w, count] : codes::row_weight_histogram(h)) hist[std::to_string(w)] = count;
    return hist;
  };
  j["z_checks"] = code.hz.rows();
  j["x_checks"] = code.hx.rows();
  j["z_check_weights"] = histogram(code.hz);
  j["x_check_weights"] = histogram(code.hx);
  j["logical_z"] = code.logical_z.support();
  j["logical_x"] = code.logical_x.support();
  ordered_json qubits = ordered_json::array();
  for (std::size_t q = 0; q < code.n; ++q) {
    ordered_json entry{{"index", q}, {"row", code.coords[q][0]}, {"col", code.coords[q][1]}};
    const std::size_t partner = codes::stabilizer_partner(code, q);
    if (partner < code.n) entry["partner"] = partner;
    qubits.push_back(entry);
  }
  j["qubits"] = qubits;
  if (c.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cli", "cannot open output file '" + c.out + "'");
    file << j.dump(2) << '\n';
  }
  return 0;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto code = codes::make_surface(c.family, c.d);
  experiments::SweepOptions opts;
  opts.cases.clear();
  for (int id : c.cases) opts.cases.push_back(experiments::case_from_number(id));
  opts.epsilons = c.epsilons;
  opts.p_star = c.p_star;
  opts.bad_site = c.bad_site;
  opts.max_weight = c.max_weight;
  opts.max_iter = c.max_iter;
  if (std::find(c.cases.begin(), c.cases.end(), 3) != c.cases.end()) {
    warn_high_prior(c.p_star, "known-bad-qubit prior", err);
  }

  auto result = experiments::sweep(code, opts);
  for (auto& r : result.records) r.seed = c.seed;
  std::vector<records::FitRow> fits;
  for (const auto& f : result.fits) {
    fits.push_back({code.name, code.d, experiments::to_string(f.id), f.fit, c.seed});
  }

  Section failures(c, out, "", "failure");
  emit_failures(failures, result.records);
  Section fit_section(c, out, ".fit", "fit");
  emit_fits(fit_section, fits);
  return 0;
}

std::vector<records::FitRow> fit_rows(const codes::CssCode& code, std::uint64_t seed,
                                      const std::vector<std::pair<std::string,
                                                                  std::optional<experiments::ScalingFit>>>& fits) {
  std::vector<records::FitRow> rows;
  for (const auto& [label, fit] : fits) {
    if (fit) rows.push_back({code.name, code.d, label, *fit, seed});
  }
  return rows;
}

int run_learn(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto code = codes::make_surface(c.family, c.d);
  const auto truth = noise::ErrorModel::iid(code.n, c.epsilon).with_override(c.bad_site, c.p_star);
  adaptive::LearningOptions opts;
  opts.initial_prior = c.epsilon;
  opts.target = c.bad_site;
  opts.sweep_epsilons = c.epsilons;
  opts.run_sweeps = c.run_sweep;
  opts.max_iter = c.max_iter;
  const auto run = adaptive::run_learning(code, truth, c.gamma, c.rounds, c.seed, opts);

  Section history(c, out, "", "history");
  emit_history(history, run.rows);
  if (c.run_sweep) {
    auto sweeps = run.before;
    sweeps.insert(sweeps.end(), run.after.begin(), run.after.end());
    for (auto& r : sweeps) r.seed = c.seed;
    Section sweep_section(c, out, ".sweep", "failure");
    emit_failures(sweep_section, sweeps);
    Section fit_section(c, out, ".fit", "fit");
    emit_fits(fit_section, fit_rows(code, c.seed,
                                    {{"initial_priors", run.fit_before},
                                     {"learned_priors", run.fit_after}}));
  }

  const auto& p = run.state.priors;
  err << "info: final prior on site " << c.bad_site << " = " << records::format_double(p[c.bad_site]);
  if (run.partner < code.n) {
    err << ", partner " << run.partner << " = " << records::format_double(p[run.partner]);
  }
  err << ", median of others = "
      << records::format_double(adaptive::median_prior_excluding(p, c.bad_site, run.partner)) << '\n'
      << "info: mean soft value on corrected bits = "
      << records::format_double(run.soft.mean_on_correction()) << '\n';
  return 0;
}

int run_calibrate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto code = codes::make_surface(c.family, c.d);
  adaptive::CalibrationOptions opts;
  opts.theta_target = c.theta_target;
  opts.theta0 = c.theta0;
  opts.theta_initial = c.theta_initial;
  opts.gain_theta = c.gamma_theta;
  opts.gain = c.gamma;
  opts.epsilon = c.epsilon;
  opts.rounds = c.rounds;
  opts.target_qubit = c.bad_site;
  opts.sweep_epsilons = c.epsilons;
  opts.run_sweep = c.run_sweep;
  opts.max_iter = c.max_iter;
  const auto run = adaptive::run_calibration(code, c.seed, opts);

  Section history(c, out, "", "history");
  emit_history(history, run.rows);
  if (c.run_sweep) {
    auto sweep = run.sweep;
    for (auto& r : sweep) r.seed = c.seed;
    Section sweep_section(c, out, ".sweep", "failure");
    emit_failures(sweep_section, sweep);
    Section fit_section(c, out, ".fit", "fit");
    emit_fits(fit_section, fit_rows(code, c.seed, {{"post_calibration", run.fit}}));
  }
  err << "info: window mean flip probability = " << records::format_double(run.window_mean_flip)
      << " (target " << records::format_double(run.state.p_target()) << ")\n";
  return 0;
}

int run_lemma(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto code = codes::make_surface(c.family, c.d);
  const double prior_known = c.prior_known.value_or(c.p_star);
  warn_high_prior(prior_known, "known-site prior", err);
  std::vector<double> p(code.n, c.epsilon);
  const std::set<std::size_t> known(c.known_sites.begin(), c.known_sites.end());
  for (std::size_t s : known) p[s] = prior_known;
  const auto outcome =
      experiments::lemma_check_detailed(code, known, c.n2, bposd::PriorVector(p), c.max_iter);

  Section section(c, out, "", "lemma");
  std::string counterexample;
  if (outcome.counterexample) {
    for (std::size_t q : outcome.counterexample->support()) {
      if (!counterexample.empty()) counterexample += ';';
      counterexample += std::to_string(q);
    }
  }
  if (section.format() == records::Format::csv) {
    std::string sites;
    for (std::size_t s : known) {
      if (!sites.empty()) sites += ';';
      sites += std::to_string(s);
    }
    section.stream() << "code,d,known_sites,n2,prior_known,epsilon,holds,errors_checked,counterexample\n"
                     << code.name << ',' << code.d << ',' << sites << ',' << c.n2 << ','
                     << records::format_double(prior_known) << ','
                     << records::format_double(c.epsilon) << ',' << (outcome.holds ? 1 : 0) << ','
                     << outcome.errors_checked << ',' << counterexample << '\n';
  } else {
    ordered_json j{{"code", code.name},
                   {"d", code.d},
                   {"known_sites", known},
                   {"n2", c.n2},
                   {"prior_known", prior_known},
                   {"epsilon", c.epsilon},
                   {"holds", outcome.holds},
                   {"errors_checked", outcome.errors_checked},
                   {"counterexample", outcome.counterexample
                                          ? ordered_json(outcome.counterexample->support())
                                          : ordered_json(nullptr)}};
    section.stream() << j.dump() << '\n';
  }
  return 0;
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [name, value] : kCommands) {
    if (value == command) return name;
  }
  return "unknown";
}

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Prior-informed BPOSD decoding experiments on surface codes", "bposd"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with flat keys named after the long flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();

  std::string command;
  std::string family;
  std::string format = "csv";
  std::optional<double> prior_known;
  bool no_sweep = false;

  app.add_option("command", command, "code-info | sweep | learn | calibrate | lemma")
      ->required()
      ->check(CLI::IsMember({"code-info", "sweep", "learn", "calibrate", "lemma"}));
  auto* code_opt = app.add_option("--code", family, "rotated | unrotated")
                       ->check(CLI::IsMember({"rotated", "unrotated"}));
  app.add_option("--d", c.d, "code distance (>= 2)");
  app.add_option("--cases", c.cases, "cases to sweep: 1 identical, 2 unknown bad, 3 known bad")
      ->delimiter(',');
  app.add_option("--eps", c.epsilons, "background error-rate grid")->delimiter(',');
  app.add_option("--p-star", c.p_star, "error rate of the bad qubit");
  app.add_option("--bad-site", c.bad_site, "index of the bad (or calibrated) qubit");
  app.add_option("--gamma", c.gamma, "prior-learning gain");
  app.add_option("--gamma-theta", c.gamma_theta, "calibration gain");
  app.add_option("--theta-target", c.theta_target, "target rotation angle (rad)");
  app.add_option("--theta0", c.theta0, "hidden gate offset (rad)");
  app.add_option("--theta-initial", c.theta_initial, "initial controller angle (rad)");
  app.add_option("--epsilon", c.epsilon, "background error rate for learn/calibrate/lemma");
  auto* rounds_opt = app.add_option("--rounds", c.rounds, "rounds (default 2000 learn, 4000 calibrate)");
  app.add_option("--seed", c.seed, "random seed")->envname("QEC_SEED");
  app.add_option("--max-iter", c.max_iter, "BP iteration cap");
  app.add_option("--max-weight", c.max_weight, "weight cap for codes too large to enumerate");
  app.add_option("--known-sites", c.known_sites, "lemma: sites with known high error rate")
      ->delimiter(',');
  app.add_option("--n2", c.n2, "lemma: flips allowed off the known sites");
  app.add_option("--prior-known", prior_known, "lemma: prior on known sites (default p-star)");
  app.add_flag("--no-sweep", no_sweep, "skip the post-run failure sweeps");
  app.add_option("--out", c.out, "output path (stdout when omitted)")->configurable(false);
  app.add_option("--format", format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw UsageError{app.help(), 0};
  } catch (const CLI::ConfigError& e) {
    // CLI11 phrases rejected config keys in terms of INI files.
    const std::string prefix = "INI was not able to parse ";
    std::string msg = e.what();
    if (msg.rfind(prefix, 0) == 0) msg = "unknown config key '" + msg.substr(prefix.size()) + "'";
    throw UsageError{msg};
  } catch (const CLI::ParseError& e) {
    throw UsageError{e.what()};
  }

  c.command = kCommands.at(command);
  if (code_opt->count() > 0) {
    c.family = codes::family_from_string(family);
  } else {
    // Calibration targets a qubit with no weight-2 partner by default.
    c.family = c.command == Command::calibrate ? codes::Family::unrotated : codes::Family::rotated;
  }
  if (rounds_opt->count() == 0) c.rounds = c.command == Command::calibrate ? 4000 : 2000;
  c.format = records::format_from_string(format);
  c.prior_known = prior_known;
  c.run_sweep = !no_sweep;
  validate(c);
  return c;
}

std::string config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = to_string(c.command);
  j["code"] = codes::to_string(c.family);
  j["d"] = c.d;
  j["cases"] = c.cases;
  j["eps"] = c.epsilons;
  j["p-star"] = c.p_star;
  j["bad-site"] = c.bad_site;
  j["gamma"] = c.gamma;
  j["gamma-theta"] = c.gamma_theta;
  j["theta-target"] = c.theta_target;
  j["theta0"] = c.theta0;
  j["theta-initial"] = c.theta_initial;
  j["epsilon"] = c.epsilon;
  j["rounds"] = c.rounds;
  j["seed"] = c.seed;
  j["max-iter"] = c.max_iter;
  j["max-weight"] = c.max_weight;
  j["known-sites"] = c.known_sites;
  j["n2"] = c.n2;
  if (c.prior_known) j["prior-known"] = *c.prior_known;
  j["no-sweep"] = !c.run_sweep;
  j["format"] = c.format == records::Format::csv ? "csv" : "jsonl";
  return j.dump();
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::code_info: return run_code_info(config, out);
    case Command::sweep: return run_sweep(config, out, err);
    case Command::learn: return run_learn(config, out, err);
    case Command::calibrate: return run_calibrate(config, out, err);
    case Command::lemma: return run_lemma(config, out, err);
  }
  return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse_config(argc, argv), out, err);
  } catch (const UsageError& e) {
    (e.exit_code == 0 ? out : err) << e.message << (e.exit_code == 0 ? "" : "\n");
    if (e.exit_code != 0) err << "run with --help for usage\n";
    return e.exit_code;
  } catch (const Error& e) {
    err << "error [" << e.module() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qec::cli
