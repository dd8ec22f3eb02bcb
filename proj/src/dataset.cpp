#include "hobmi/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InputError(at_line(line, "invalid number '" + std::string(field) + "'"));
  }
  return value;
}

std::string format17(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

std::vector<std::string> channel_labels(std::size_t count, const std::string& stem) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < count; ++i) labels.push_back(stem + std::to_string(i + 1));
  return labels;
}

Dataset parse_csv(std::istream& in) {
  Dataset out;
  std::string line;
  std::size_t number = 0;
  std::vector<std::string_view> header;
  std::string header_line;

  while (std::getline(in, line)) {
    ++number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::string_view note = trim(text.substr(1));
      if (!out.provenance.empty()) out.provenance += '\n';
      out.provenance += note;
      continue;
    }
    header_line = line;
    break;
  }
  if (header_line.empty()) throw InputError("missing header row");
  header = split(trim(header_line));
  if (header.size() < 2 || header.front() != "time") {
    throw InputError(at_line(number, "header must be time,<label>..."));
  }
  for (std::size_t i = 1; i < header.size(); ++i) out.labels.emplace_back(header[i]);
  const std::size_t q = out.labels.size();

  std::vector<double> time;
  std::vector<std::vector<double>> columns(q);
  while (std::getline(in, line)) {
    ++number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text);
    if (fields.size() != q + 1) {
      throw InputError(at_line(number, "expected " + std::to_string(q + 1) + " fields, found " +
                                           std::to_string(fields.size())));
    }
    time.push_back(parse_number(fields[0], number));
    for (std::size_t i = 0; i < q; ++i) columns[i].push_back(parse_number(fields[i + 1], number));
  }

  const std::size_t t = time.size();
  if (t < 2) throw InputError("need at least two samples");
  for (std::size_t k = 1; k < t; ++k) {
    if (!(time[k] > time[k - 1])) throw InputError("time not monotone");
  }
  const double step = (time.back() - time.front()) / static_cast<double>(t - 1);
  for (std::size_t k = 0; k < t; ++k) {
    const double expected = time.front() + static_cast<double>(k) * step;
    if (std::abs(time[k] - expected) > 1e-6 * step) throw InputError("time grid not uniform");
  }

  RowMatrix samples(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t k = 0; k < t; ++k) {
      samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = columns[i][k];
    }
  }
  out.signal = SignalMatrix(std::move(samples), 1.0 / step, time.front());
  return out;
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const SignalMatrix& x = data.signal;
  if (data.labels.size() != x.channels()) throw InputError("label count does not match channels");
  if (!data.provenance.empty()) {
    std::istringstream notes(data.provenance);
    std::string note;
    while (std::getline(notes, note)) out << "# " << note << '\n';
  }
  out << "time";
  for (const std::string& label : data.labels) out << ',' << label;
  out << '\n';
  for (std::size_t k = 0; k < x.length(); ++k) {
    out << format17(x.time(k));
    for (std::size_t i = 0; i < x.channels(); ++i) out << ',' << format17(x.channel(i)[k]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_csv(out, data);
}

}  // namespace hobmi
