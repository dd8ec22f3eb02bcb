#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hobmi {

struct ReportMode {
  double frequency = 0.0;  // Hz
  double damping = 0.0;    // 1/s
  std::optional<std::size_t> order_m;
};

/// Reference mode and its matched estimate. Unmatched references carry NaN
/// estimates and errors.
struct ReferenceError {
  double f_ref = 0.0;
  double sigma_ref = 0.0;
  double frequency = 0.0;
  double damping = 0.0;
  double f_abs_err = 0.0;
  double sigma_abs_err = 0.0;
};

struct Table1Row {
  std::string family;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::size_t mode = 0;  // 1-based
  double f_s = 0.0, sigma_s = 0.0;
  double f_hobi = 0.0, sigma_hobi = 0.0;
  double f_sobi = 0.0, sigma_sobi = 0.0;
};

struct Table1Summary {
  std::string family;
  double alpha = 0.0;
  std::size_t seeds = 0;
  std::size_t hobi_closer = 0;  // seeds where HOBI-HT mode 2 is nearer the baseline
};

struct RunReport {
  std::string method;  // HOBI-HT, SOBI-HT, HOBMI or TABLE1
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<ReportMode> modes;
  std::optional<std::vector<ReferenceError>> errors;
  std::vector<Table1Row> table;
  std::vector<Table1Summary> summary;
};

enum class ReportFormat { Json, Csv, Pretty };
ReportFormat parse_report_format(std::string_view name);

struct EmitOptions {
  ReportFormat format = ReportFormat::Json;
  /// Print |sigma| everywhere (positive damping convention).
  bool abs_sigma = false;
};

/// Numbers are rounded to 6 significant digits; field order is fixed, so the
/// same report always yields the same bytes.
std::string emit(const RunReport& report, const EmitOptions& options = {});

nlohmann::ordered_json to_json(const RunReport& report, bool abs_sigma = false);
RunReport report_from_json(const nlohmann::ordered_json& json);
RunReport parse_report(std::string_view json_text);

/// Round to 6 significant digits (NaN and infinities pass through).
double round6(double value);

}  // namespace hobmi
