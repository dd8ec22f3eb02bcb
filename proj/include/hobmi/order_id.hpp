#pragma once

// Model-order identification: repeat the separation + Hilbert analysis on
// delay-embedded observations of growing dimension 2m and keep, per mode
// column, the estimate whose conjugate-pair members agree best.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hobmi/bss.hpp"
#include "hobmi/signal.hpp"

namespace hobmi {

/// Delay-coordinate matrix: row r, column c holds x[c + r * delay].
struct EmbeddedObservation {
  RowMatrix rows;
  std::size_t channel = 0;
  std::size_t delay = 1;
};

EmbeddedObservation takens_embed(std::span<const double> x, std::size_t dimension,
                                 std::size_t delay = 1, std::size_t channel = 0);

/// Half-open sample range [begin, end).
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const SampleRange&) const = default;
};

struct WindowOptions {
  std::optional<SampleRange> manual;
  double length_s = 10.0;
};

/// Ringdown window: starts at the largest one-step change (the event onset),
/// nudged to the highest one-second energy within the following half second,
/// and runs for `length_s` seconds or to the end of the signal.
SampleRange select_window(std::span<const double> x, double fs, const WindowOptions& options = {});

/// Multichannel variant; the onset is taken from the channel with the largest
/// spike relative to its own spread.
SampleRange select_window(const SignalMatrix& x, const WindowOptions& options = {});

/// Two estimates judged to be the conjugate pair of one mode.
struct ModePair {
  double frequency = 0.0;   // mean of the two members
  double damping = 0.0;     // mean of the two members
  double divergence = 0.0;  // sqrt(df^2 + dsigma^2)
  std::size_t first = 0;    // indices into the input arrays
  std::size_t second = 0;
};

/// Sorts by frequency, pairs adjacent estimates smallest-gap first (each
/// estimate used once), pairs any leftovers in frequency order, and returns
/// the pairs by ascending mean frequency. NaN estimates sort last and yield
/// NaN pairs.
std::vector<ModePair> pair_modes(std::span<const double> f, std::span<const double> sigma);

/// F_avg, Sigma_avg and D_div with rows m = 2..M_max (row index m - 2) and
/// columns k = 1..M_max (index k - 1). Entries past column m are NaN.
struct OrderScan {
  Matrix frequency;
  Matrix damping;
  Matrix divergence;
  SampleRange window;
  std::size_t m_max = 0;
};

struct DetectedMode {
  double frequency = 0.0;
  double damping = 0.0;
  std::size_t order_m = 0;  // assumed order whose scan row supplied the estimate
  std::size_t column = 0;   // 1-based mode column
  double divergence = 0.0;
};

/// Selection of the final modes from the scan.
///
/// Each eligible column contributes its minimum-divergence entry. A pick is
/// rejected when its divergence exceeds `max_relative_divergence` times its
/// frequency, and picks closer than `merge_radius` to a better (lower
/// divergence) pick, measured with the same sqrt(df^2 + dsigma^2) metric as
/// the divergence itself, are treated as the same mode.
struct DetectionOptions {
  /// Columns with this many NaN rows or more are not eligible.
  std::size_t nan_guard = 4;
  double max_relative_divergence = 0.1;
  double merge_radius = 0.02;
};

struct HobmiOptions {
  std::size_t m_max = 8;
  std::size_t delay = 1;
  WindowOptions window;
  BssMethod method = BssMethod::Hobi;
  BssOptions bss;
  double trim_frac = 0.1;
  DetectionOptions detection;
};

struct HobmiResult {
  OrderScan scan;
  std::vector<DetectedMode> modes;

  std::size_t order() const { return modes.size(); }
};

/// Observation matrix with `rows` rows: a single channel is embedded to
/// `rows` delays; several channels are each embedded to ceil(rows / q) delays
/// and stacked, keeping the first `rows`.
RowMatrix observation_matrix(const SignalMatrix& x, std::size_t rows, std::size_t delay);

HobmiResult run_hobmi(const SignalMatrix& x, const HobmiOptions& options = {});

/// Column-wise minimum-divergence picks (no filtering or merging).
std::vector<DetectedMode> column_minima(const OrderScan& scan, std::size_t nan_guard = 4);

/// Final modes, sorted by frequency.
std::vector<DetectedMode> detect_modes(const OrderScan& scan, const DetectionOptions& options = {});

}  // namespace hobmi
