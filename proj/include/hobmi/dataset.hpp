#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hobmi/signal.hpp"

namespace hobmi {

/// A measured or synthesized record with one label per channel.
///
/// CSV layout: optional leading `#` comment lines (kept as the provenance
/// note), a header `time,<label>...`, then one numeric row per sample.
struct Dataset {
  SignalMatrix signal;
  std::vector<std::string> labels;
  std::string provenance;
};

Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

/// Samples are written with 17 significant digits so they re-parse exactly.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Default labels ch1..chq.
std::vector<std::string> channel_labels(std::size_t count, const std::string& stem = "ch");

}  // namespace hobmi
