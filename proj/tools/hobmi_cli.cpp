// Command-line front end: synthesis, dependency matrices, separation, order
// identification and the two experiment runners.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hobmi/bss.hpp"
#include "hobmi/copula_sampling.hpp"
#include "hobmi/copula_stat.hpp"
#include "hobmi/dataset.hpp"
#include "hobmi/error.hpp"
#include "hobmi/experiments.hpp"
#include "hobmi/hilbert.hpp"
#include "hobmi/order_id.hpp"
#include "hobmi/report.hpp"

namespace {

using namespace hobmi;

struct Settings {
  std::string input;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 7;
  std::optional<double> fs;
  std::optional<double> window;
  std::string window_range;
  std::size_t mmax = 8;
  std::optional<double> noise_scale;
  std::string family;
  std::optional<double> alpha;
  bool abs_sigma = false;
  bool unsigned_cos = false;

  // synth
  std::string model = "numerical";
  std::vector<std::string> modes;
  double duration = 20.0;
  bool constant_decay = false;

  // cos
  std::size_t lag = 0;

  // hobi / sobi / case
  std::size_t embed = 4;
  std::optional<std::size_t> lags;
  std::string dump_sources;
  std::string dump_if;

  // hobmi / case
  std::optional<std::size_t> delay;
  std::string method = "hobmi";
  std::string reference;
  std::size_t nan_guard = 4;
  double max_rel_div = 0.1;
  double merge_radius = 0.02;
  std::size_t seeds = 1;
};

void write_output(const Settings& s, const std::string& text) {
  if (s.output.empty() || s.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(s.output, std::ios::binary);
  if (!out) throw InputError("cannot write " + s.output);
  out << text;
}

CopulaFamily family_of(const Settings& s) {
  const CopulaKind kind = parse_copula_kind(s.family.empty() ? "frank" : s.family);
  double alpha = kind == CopulaKind::Gaussian ? 0.9 : 10.0;
  if (s.alpha) alpha = *s.alpha;
  CopulaFamily f{kind, alpha};
  f.validate();
  return f;
}

BssOptions bss_of(const Settings& s) {
  BssOptions o;
  o.n_lags = s.lags;
  o.sign = s.unsigned_cos ? DependencySign::Unsigned : DependencySign::Spearman;
  return o;
}

Dataset load(const Settings& s) {
  if (s.input.empty()) throw InputError("--input is required");
  Dataset d = read_csv(s.input);
  if (s.fs) d.signal.fs = *s.fs;
  return d;
}

SampleRange parse_range(const std::string& text, double fs) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("window range must be START:END in seconds");
  try {
    const double a = std::stod(text.substr(0, colon));
    const double b = std::stod(text.substr(colon + 1));
    if (!(a >= 0.0) || !(b > a)) throw InputError("window range must satisfy 0 <= START < END");
    return {static_cast<std::size_t>(std::llround(a * fs)), static_cast<std::size_t>(std::llround(b * fs))};
  } catch (const std::logic_error&) {
    throw InputError("window range must be START:END in seconds");
  }
}

HobmiOptions hobmi_options(const Settings& s, double fs, const HobmiOptions& base) {
  HobmiOptions o = base;
  o.m_max = s.mmax;
  if (s.delay) o.delay = *s.delay;
  if (s.window) o.window.length_s = *s.window;
  if (!s.window_range.empty()) o.window.manual = parse_range(s.window_range, fs);
  o.bss = bss_of(s);
  o.detection.nan_guard = s.nan_guard;
  o.detection.max_relative_divergence = s.max_rel_div;
  o.detection.merge_radius = s.merge_radius;
  return o;
}

ModeSpec parse_mode(const std::string& text) {
  // f:sigma[:amplitude[:phase]]
  std::vector<double> parts;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ':')) {
    try {
      parts.push_back(std::stod(field));
    } catch (const std::logic_error&) {
      throw InputError("invalid mode '" + text + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 4) throw InputError("mode must be f:sigma[:amplitude[:phase]]");
  ModeSpec m;
  m.frequency = parts[0];
  m.damping = parts[1];
  if (parts.size() > 2) m.amplitude = parts[2];
  if (parts.size() > 3) m.phase = parts[3];
  return m;
}

std::vector<ReferenceMode> parse_reference(const std::string& text) {
  if (text == "lea-a") return lea_reference(CaseStudy::A);
  if (text == "lea-b") return lea_reference(CaseStudy::B);
  if (text == "published-a") return published_hobmi(CaseStudy::A);
  if (text == "published-b") return published_hobmi(CaseStudy::B);
  std::vector<ReferenceMode> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const ModeSpec m = parse_mode(item);
    out.push_back({m.frequency, m.damping});
  }
  if (out.empty()) throw InputError("empty reference");
  return out;
}

int run_synth(const Settings& s) {
  Dataset d;
  if (s.model == "numerical") {
    NumericalModelOptions o;
    o.fs = s.fs.value_or(100.0);
    o.noise_scale = s.noise_scale.value_or(0.1);
    o.decay = s.constant_decay ? DecayReading::Constant : DecayReading::TimeDependent;
    const CopulaFamily f = family_of(s);
    const NumericalModel nm = synth_numerical_model(f, o, s.seed);
    RowMatrix x(3, static_cast<Eigen::Index>(nm.mixture.length()));
    x.topRows(2) = nm.sources.samples;
    x.row(2) = nm.mixture.samples.row(0);
    d.signal = SignalMatrix(std::move(x), o.fs);
    d.labels = {"s1", "s2", "x"};
    std::ostringstream note;
    note << "Numerical model, " << to_string(f.kind) << '(' << f.parameter << ") noise x " << o.noise_scale
         << ", seed " << s.seed << ". s1, s2 are the noisy sources, x = s1 + s2.";
    d.provenance = note.str();
  } else if (s.model == "modes") {
    if (s.modes.empty()) throw InputError("--mode is required for the modes model");
    std::vector<ModeSpec> modes;
    for (const std::string& m : s.modes) modes.push_back(parse_mode(m));
    d.signal = synth_modal(modes, s.fs.value_or(20.0), s.duration);
    d.labels = {"y"};
    d.provenance = "Sum of damped sinusoids.";
  } else if (s.model == "case-a" || s.model == "case-b") {
    d = case_surrogate(s.model == "case-a" ? CaseStudy::A : CaseStudy::B, s.seed);
  } else {
    throw InputError("unknown model '" + s.model + "'");
  }
  std::ostringstream out;
  write_csv(out, d);
  write_output(s, out.str());
  return 0;
}

int run_cos(const Settings& s) {
  const Dataset d = load(s);
  const DependencyMatrix m = dependency_matrix(d.signal.samples, s.lag);
  const Matrix& e = m.entries;
  std::ostringstream out;
  const ReportFormat format = parse_report_format(s.format);
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json j;
    j["method"] = "CoS";
    j["config"] = {{"lag", s.lag}};
    j["channels"] = d.labels;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index k = 0; k < e.cols(); ++k) row.push_back(round6(e(i, k)));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    out << j.dump(2) << '\n';
  } else {
    const char sep = format == ReportFormat::Csv ? ',' : ' ';
    out << (format == ReportFormat::Csv ? "channel" : "        ");
    for (const std::string& label : d.labels) out << sep << label;
    out << '\n';
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      out << d.labels[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < e.cols(); ++k) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.6g", e(i, k));
        out << sep << buffer;
      }
      out << '\n';
    }
  }
  write_output(s, out.str());
  return 0;
}

int run_separation(const Settings& s, BssMethod method) {
  const Dataset d = load(s);
  SignalMatrix x = d.signal;
  const std::size_t delay = s.delay.value_or(1);
  if (x.channels() == 1) x = SignalMatrix(takens_embed(x.channel(0), s.embed, delay).rows, x.fs, x.t0);

  const DemixingResult result = separate(method, x, bss_of(s));
  const std::vector<ModalOutcome> outcomes = modal_estimates(result, x.fs);

  RunReport report;
  report.method = std::string(to_string(method));
  report.config["channels"] = d.labels;
  report.config["fs"] = x.fs;
  if (d.signal.channels() == 1) {
    report.config["embedding"] = s.embed;
    report.config["delay"] = delay;
  }
  report.config["lags"] = result.lags.size();
  report.config["jad_sweeps"] = result.jad.sweeps;
  if (method == BssMethod::Hobi) report.config["cos_sign"] = s.unsigned_cos ? "unsigned" : "spearman";
  for (const ModalOutcome& o : outcomes) {
    if (o.estimate) report.modes.push_back({o.estimate->frequency, o.estimate->damping, std::nullopt});
  }
  if (!s.reference.empty()) report.errors = match_reference(report.modes, parse_reference(s.reference));

  if (!s.dump_sources.empty()) {
    Dataset y{SignalMatrix(result.sources, x.fs, x.t0), channel_labels(static_cast<std::size_t>(result.sources.rows()), "y"),
              "Separated sources, " + report.method + "."};
    write_csv(s.dump_sources, y);
  }
  if (!s.dump_if.empty()) {
    RowMatrix traces(result.sources.rows(), result.sources.cols());
    for (Eigen::Index i = 0; i < traces.rows(); ++i) {
      const auto row = result.sources.row(i);
      const std::vector<double> f =
          instantaneous_frequency(analytic_signal({row.data(), static_cast<std::size_t>(row.size())}, x.fs));
      for (Eigen::Index k = 0; k < traces.cols(); ++k) traces(i, k) = f[static_cast<std::size_t>(k)];
    }
    Dataset trace{SignalMatrix(std::move(traces), x.fs, x.t0), channel_labels(static_cast<std::size_t>(result.sources.rows()), "f"),
                  "Instantaneous frequency (Hz) of the separated sources, " + report.method + "."};
    write_csv(s.dump_if, trace);
  }
  write_output(s, emit(report, {parse_report_format(s.format), s.abs_sigma}));
  return 0;
}

int run_order(const Settings& s) {
  const Dataset d = load(s);
  CaseOptions o;
  o.method = CaseMethod::Hobmi;
  o.hobmi = hobmi_options(s, d.signal.fs, HobmiOptions{});
  std::optional<std::vector<ReferenceMode>> reference;
  if (!s.reference.empty()) reference = parse_reference(s.reference);
  write_output(s, emit(run_casestudy(d, o, reference), {parse_report_format(s.format), s.abs_sigma}));
  return 0;
}

int run_table(const Settings& s) {
  Table1Options o;
  o.seed = s.seed;
  o.seed_count = s.seeds;
  if (s.noise_scale) o.noise_scale = *s.noise_scale;
  if (s.fs) o.fs = *s.fs;
  o.decay = s.constant_decay ? DecayReading::Constant : DecayReading::TimeDependent;
  o.embedding = s.embed;
  o.delay = s.delay.value_or(1);
  o.bss = bss_of(s);
  if (!s.family.empty() && s.family != "all") o.families = {family_of(s)};
  write_output(s, emit(run_table1(o), {parse_report_format(s.format), s.abs_sigma}));
  return 0;
}

int run_case(const Settings& s) {
  const Dataset d = load(s);
  CaseOptions o;
  if (s.method == "hobmi") {
    o.method = CaseMethod::Hobmi;
  } else if (s.method == "hobi") {
    o.method = CaseMethod::HobiHt;
  } else if (s.method == "sobi") {
    o.method = CaseMethod::SobiHt;
  } else {
    throw InputError("unknown method '" + s.method + "'");
  }
  o.hobmi = hobmi_options(s, d.signal.fs, case_hobmi_options());
  o.embedding = s.embed;
  std::optional<std::vector<ReferenceMode>> reference;
  if (!s.reference.empty()) reference = parse_reference(s.reference);
  write_output(s, emit(run_casestudy(d, o, reference), {parse_report_format(s.format), s.abs_sigma}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Copula-statistic blind source separation and modal identification"};
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  app.add_option("--input,-i", s.input, "Input CSV (time,<channels>...)");
  app.add_option("--output,-o", s.output, "Output file (default stdout)");
  app.add_option("--format", s.format, "json, csv or pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--seed", s.seed, "Random seed");
  app.add_option("--fs", s.fs, "Sampling rate in Hz (overrides the CSV time column)");
  app.add_option("--window", s.window, "Analysis window length in seconds");
  app.add_option("--window-range", s.window_range, "Manual analysis window START:END in seconds");
  app.add_option("--mmax", s.mmax, "Largest model order scanned")->check(CLI::Range(2, 64));
  app.add_option("--noise-scale", s.noise_scale, "Copula noise amplitude");
  app.add_option("--family", s.family, "frank, clayton, gumbel or gaussian (default frank; table1 runs all four unless given)");
  app.add_option("--alpha", s.alpha, "Copula parameter");
  app.add_flag("--abs-sigma", s.abs_sigma, "Print damping as a positive magnitude");
  app.add_flag("--unsigned-cos", s.unsigned_cos, "Use the unsigned copula statistic in HOBI");
  app.add_option("--model", s.model, "synth: numerical, modes, case-a or case-b");
  app.add_option("--mode", s.modes, "synth modes: f:sigma[:amplitude[:phase]] (repeatable)");
  app.add_option("--duration", s.duration, "synth modes: length in seconds");
  app.add_flag("--constant-decay", s.constant_decay, "Numerical model with constant decay factors");
  app.add_option("--lag", s.lag, "cos: lag in samples");
  app.add_option("--embed", s.embed, "Delay-embedding rows for single-channel separation");
  app.add_option("--lags", s.lags, "Number of lagged matrices in the joint diagonalization");
  app.add_option("--delay", s.delay, "Embedding delay in samples");
  app.add_option("--dump-sources", s.dump_sources, "Write separated sources to this CSV");
  app.add_option("--dump-if", s.dump_if, "Write instantaneous-frequency traces to this CSV");
  app.add_option("--method", s.method, "case: hobmi, hobi or sobi");
  app.add_option("--reference", s.reference,
                 "Reference modes: lea-a, lea-b, published-a, published-b or f:sigma,f:sigma,...");
  app.add_option("--nan-guard", s.nan_guard, "Skip scan columns with this many NaN rows");
  app.add_option("--max-rel-div", s.max_rel_div, "Reject picks with divergence above this fraction of f");
  app.add_option("--merge-radius", s.merge_radius, "Merge picks closer than this in (f, sigma)");
  app.add_option("--seeds", s.seeds, "table1: number of consecutive seeds")->check(CLI::PositiveNumber);

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Settings&);
  };
  const Command commands[] = {
      {"synth", "Write a synthetic dataset as CSV", run_synth},
      {"cos", "Copula-statistic dependency matrix of a CSV", run_cos},
      {"hobi", "HOBI-HT separation and modal estimates",
       [](const Settings& x) { return run_separation(x, BssMethod::Hobi); }},
      {"sobi", "SOBI-HT separation and modal estimates",
       [](const Settings& x) { return run_separation(x, BssMethod::Sobi); }},
      {"hobmi", "Order identification and modal estimates", run_order},
      {"table1", "HOBI-HT vs SOBI-HT on the two-tone numerical model", run_table},
      {"case", "Case-study run with optional reference errors", run_case},
  };
  int (*selected)(const Settings&) = nullptr;
  for (const Command& c : commands) {
    app.add_subcommand(c.name, c.help)->fallthrough()->callback([&selected, run = c.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return selected(s);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
