#include "hobmi/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format6(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return round6(value);
}

double read_number(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNaN;
  if (!j.at(key).is_number()) throw InputError(std::string("report field '") + key + "' is not a number");
  return j.at(key).get<double>();
}

std::string config_value(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) return format6(value.get<double>());
  return value.dump();
}

void csv_modes(std::ostream& out, const RunReport& r) {
  out << "mode,f_hz,sigma,order_m\n";
  for (std::size_t k = 0; k < r.modes.size(); ++k) {
    const ReportMode& m = r.modes[k];
    out << k + 1 << ',' << format6(m.frequency) << ',' << format6(m.damping) << ',';
    if (m.order_m) out << *m.order_m;
    out << '\n';
  }
}

void csv_errors(std::ostream& out, const std::vector<ReferenceError>& errors) {
  out << "reference,f_ref,sigma_ref,f_hz,sigma,f_abs_err,sigma_abs_err\n";
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const ReferenceError& e = errors[k];
    out << k + 1 << ',' << format6(e.f_ref) << ',' << format6(e.sigma_ref) << ','
        << format6(e.frequency) << ',' << format6(e.damping) << ',' << format6(e.f_abs_err) << ','
        << format6(e.sigma_abs_err) << '\n';
  }
}

void csv_table(std::ostream& out, const RunReport& r) {
  out << "family,alpha,seed,mode,f_s,sigma_s,f_hobi,sigma_hobi,f_sobi,sigma_sobi\n";
  for (const Table1Row& row : r.table) {
    out << row.family << ',' << format6(row.alpha) << ',' << row.seed << ',' << row.mode << ','
        << format6(row.f_s) << ',' << format6(row.sigma_s) << ',' << format6(row.f_hobi) << ','
        << format6(row.sigma_hobi) << ',' << format6(row.f_sobi) << ','
        << format6(row.sigma_sobi) << '\n';
  }
}

void pad(std::ostream& out, const std::string& text, std::size_t width) {
  out << text;
  for (std::size_t k = text.size(); k < width; ++k) out << ' ';
}

Json rounded(const Json& value) {
  if (value.is_number_float()) return number(value.get<double>());
  if (value.is_structured()) {
    Json out = value;
    for (auto& item : out) item = rounded(item);
    return out;
  }
  return value;
}

}  // namespace

double round6(double value) {
  if (!std::isfinite(value)) return value;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return std::strtod(buffer, nullptr);
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "pretty") return ReportFormat::Pretty;
  throw InputError("unknown format '" + std::string(name) + "'");
}

Json to_json(const RunReport& r, bool abs_sigma) {
  const auto sig = [&](double s) { return number(abs_sigma ? std::abs(s) : s); };
  Json j;
  j["method"] = r.method;
  j["config"] = rounded(r.config);
  Json modes = Json::array();
  for (const ReportMode& m : r.modes) {
    Json entry;
    entry["f_hz"] = number(m.frequency);
    entry["sigma"] = sig(m.damping);
    entry["order_m"] = m.order_m ? Json(*m.order_m) : Json(nullptr);
    modes.push_back(std::move(entry));
  }
  j["modes"] = std::move(modes);
  if (r.errors) {
    Json errors = Json::array();
    for (const ReferenceError& e : *r.errors) {
      Json entry;
      entry["f_ref"] = number(e.f_ref);
      entry["sigma_ref"] = sig(e.sigma_ref);
      entry["f_hz"] = number(e.frequency);
      entry["sigma"] = sig(e.damping);
      entry["f_abs_err"] = number(e.f_abs_err);
      entry["sigma_abs_err"] = number(e.sigma_abs_err);
      errors.push_back(std::move(entry));
    }
    j["errors"] = std::move(errors);
  }
  if (!r.table.empty()) {
    Json table = Json::array();
    for (const Table1Row& row : r.table) {
      Json entry;
      entry["family"] = row.family;
      entry["alpha"] = number(row.alpha);
      entry["seed"] = row.seed;
      entry["mode"] = row.mode;
      entry["f_s"] = number(row.f_s);
      entry["sigma_s"] = sig(row.sigma_s);
      entry["f_hobi"] = number(row.f_hobi);
      entry["sigma_hobi"] = sig(row.sigma_hobi);
      entry["f_sobi"] = number(row.f_sobi);
      entry["sigma_sobi"] = sig(row.sigma_sobi);
      table.push_back(std::move(entry));
    }
    j["table"] = std::move(table);
  }
  if (!r.summary.empty()) {
    Json summary = Json::array();
    for (const Table1Summary& s : r.summary) {
      Json entry;
      entry["family"] = s.family;
      entry["alpha"] = number(s.alpha);
      entry["seeds"] = s.seeds;
      entry["hobi_closer"] = s.hobi_closer;
      summary.push_back(std::move(entry));
    }
    j["summary"] = std::move(summary);
  }
  return j;
}

RunReport report_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("method") || !j.contains("modes")) {
    throw InputError("not a run report");
  }
  RunReport r;
  r.method = j.at("method").get<std::string>();
  if (j.contains("config")) r.config = j.at("config");
  for (const Json& m : j.at("modes")) {
    ReportMode mode;
    mode.frequency = read_number(m, "f_hz");
    mode.damping = read_number(m, "sigma");
    if (m.contains("order_m") && !m.at("order_m").is_null()) mode.order_m = m.at("order_m").get<std::size_t>();
    r.modes.push_back(mode);
  }
  if (j.contains("errors")) {
    r.errors.emplace();
    for (const Json& e : j.at("errors")) {
      r.errors->push_back({read_number(e, "f_ref"), read_number(e, "sigma_ref"), read_number(e, "f_hz"),
                           read_number(e, "sigma"), read_number(e, "f_abs_err"),
                           read_number(e, "sigma_abs_err")});
    }
  }
  if (j.contains("table")) {
    for (const Json& e : j.at("table")) {
      Table1Row row;
      row.family = e.at("family").get<std::string>();
      row.alpha = read_number(e, "alpha");
      row.seed = e.at("seed").get<std::uint64_t>();
      row.mode = e.at("mode").get<std::size_t>();
      row.f_s = read_number(e, "f_s");
      row.sigma_s = read_number(e, "sigma_s");
      row.f_hobi = read_number(e, "f_hobi");
      row.sigma_hobi = read_number(e, "sigma_hobi");
      row.f_sobi = read_number(e, "f_sobi");
      row.sigma_sobi = read_number(e, "sigma_sobi");
      r.table.push_back(row);
    }
  }
  if (j.contains("summary")) {
    for (const Json& e : j.at("summary")) {
      r.summary.push_back({e.at("family").get<std::string>(), read_number(e, "alpha"),
                           e.at("seeds").get<std::size_t>(), e.at("hobi_closer").get<std::size_t>()});
    }
  }
  return r;
}

RunReport parse_report(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return report_from_json(j);
}

std::string emit(const RunReport& r, const EmitOptions& options) {
  std::ostringstream out;
  switch (options.format) {
    case ReportFormat::Json:
      out << to_json(r, options.abs_sigma).dump(2) << '\n';
      break;
    case ReportFormat::Csv: {
      RunReport shown = r;
      if (options.abs_sigma) {
        for (ReportMode& m : shown.modes) m.damping = std::abs(m.damping);
        if (shown.errors) {
          for (ReferenceError& e : *shown.errors) {
            e.sigma_ref = std::abs(e.sigma_ref);
            e.damping = std::abs(e.damping);
          }
        }
        for (Table1Row& row : shown.table) {
          row.sigma_s = std::abs(row.sigma_s);
          row.sigma_hobi = std::abs(row.sigma_hobi);
          row.sigma_sobi = std::abs(row.sigma_sobi);
        }
      }
      if (!shown.table.empty()) {
        csv_table(out, shown);
      } else {
        csv_modes(out, shown);
        if (shown.errors) {
          out << '\n';
          csv_errors(out, *shown.errors);
        }
      }
      break;
    }
    case ReportFormat::Pretty: {
      const auto sig = [&](double s) { return format6(options.abs_sigma ? std::abs(s) : s); };
      out << r.method << '\n';
      for (const auto& [key, value] : r.config.items()) out << "  " << key << " = " << config_value(value) << '\n';
      if (!r.modes.empty()) {
        out << '\n';
        pad(out, "mode", 6);
        pad(out, "f [Hz]", 14);
        pad(out, "sigma [1/s]", 14);
        out << "order\n";
        for (std::size_t k = 0; k < r.modes.size(); ++k) {
          const ReportMode& m = r.modes[k];
          pad(out, std::to_string(k + 1), 6);
          pad(out, format6(m.frequency), 14);
          pad(out, sig(m.damping), 14);
          out << (m.order_m ? std::to_string(*m.order_m) : "-") << '\n';
        }
      }
      if (r.errors) {
        out << "\nreference     f_ref        sigma_ref    |df|         |dsigma|\n";
        for (std::size_t k = 0; k < r.errors->size(); ++k) {
          const ReferenceError& e = (*r.errors)[k];
          pad(out, std::to_string(k + 1), 14);
          pad(out, format6(e.f_ref), 13);
          pad(out, sig(e.sigma_ref), 13);
          pad(out, format6(e.f_abs_err), 13);
          out << format6(e.sigma_abs_err) << '\n';
        }
      }
      if (!r.table.empty()) {
        out << "\nfamily    alpha  seed  mode  f_s         sigma_s     f_hobi      sigma_hobi  f_sobi      "
               "sigma_sobi\n";
        for (const Table1Row& row : r.table) {
          pad(out, row.family, 10);
          pad(out, format6(row.alpha), 7);
          pad(out, std::to_string(row.seed), 6);
          pad(out, std::to_string(row.mode), 6);
          pad(out, format6(row.f_s), 12);
          pad(out, sig(row.sigma_s), 12);
          pad(out, format6(row.f_hobi), 12);
          pad(out, sig(row.sigma_hobi), 12);
          pad(out, format6(row.f_sobi), 12);
          out << sig(row.sigma_sobi) << '\n';
        }
      }
      if (!r.summary.empty()) {
        out << "\nmode-2 frequency nearer the HT-of-sources baseline\n";
        for (const Table1Summary& s : r.summary) {
          out << "  " << s.family << '(' << format6(s.alpha) << "): HOBI-HT in " << s.hobi_closer << '/'
              << s.seeds << " seeds\n";
        }
      }
      break;
    }
  }
  return out.str();
}

}  // namespace hobmi
