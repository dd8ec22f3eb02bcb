#include "hobmi/order_id.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinWindowSamples = 64;

}  // namespace

EmbeddedObservation takens_embed(std::span<const double> x, std::size_t dimension,
                                 std::size_t delay, std::size_t channel) {
  if (dimension == 0 || delay == 0) throw InputError("embedding dimension and delay must be positive");
  const std::size_t span = (dimension - 1) * delay;
  if (span >= x.size()) throw InputError("embedding exceeds signal length");
  const std::size_t cols = x.size() - span;

  EmbeddedObservation out;
  out.channel = channel;
  out.delay = delay;
  out.rows.resize(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < dimension; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x[c + r * delay];
    }
  }
  return out;
}

SampleRange select_window(std::span<const double> x, double fs, const WindowOptions& options) {
  if (x.size() < kMinWindowSamples) throw InputError("signal too short for window selection");
  if (options.manual) {
    const SampleRange& r = *options.manual;
    if (r.begin >= r.end || r.end > x.size()) throw InputError("window outside signal");
    return r;
  }
  std::size_t onset = 0;
  double spike = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double step = std::abs(x[k + 1] - x[k]);
    if (step > spike) {
      spike = step;
      onset = k;
    }
  }
  if (!(spike > 0.0)) throw NumericalError("no event detected");

  // Highest one-second energy among starts in the half second after onset.
  const auto frame = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fs)));
  const auto search = static_cast<std::size_t>(std::llround(0.5 * fs));
  std::size_t begin = onset;
  double best = -1.0;
  for (std::size_t k = onset; k <= onset + search && k < x.size(); ++k) {
    const std::size_t stop = std::min(x.size(), k + frame);
    double energy = 0.0;
    for (std::size_t j = k; j < stop; ++j) energy += x[j] * x[j];
    if (energy > best) {
      best = energy;
      begin = k;
    }
  }
  const auto length = static_cast<std::size_t>(std::llround(options.length_s * fs));
  SampleRange out{begin, std::min(x.size(), begin + std::max<std::size_t>(length, 1))};
  // Too little signal after the onset: fall back to the trailing 64 samples.
  if (out.size() < kMinWindowSamples) out = {x.size() - kMinWindowSamples, x.size()};
  return out;
}

SampleRange select_window(const SignalMatrix& x, const WindowOptions& options) {
  if (options.manual || x.channels() == 1) return select_window(x.channel(0), x.fs, options);
  std::size_t pick = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < x.channels(); ++i) {
    const auto row = x.channel(i);
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(row.size()));
    if (!(sd > 0.0)) continue;
    double spike = 0.0;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) spike = std::max(spike, std::abs(row[k + 1] - row[k]));
    if (spike / sd > best) {
      best = spike / sd;
      pick = i;
    }
  }
  return select_window(x.channel(pick), x.fs, options);
}

std::vector<ModePair> pair_modes(std::span<const double> f, std::span<const double> sigma) {
  if (f.size() != sigma.size()) throw InputError("frequency/damping length mismatch");
  if (f.size() % 2 != 0) throw InputError("unpaired estimate");
  const std::size_t n = f.size();

  auto valid = [&](std::size_t i) { return std::isfinite(f[i]) && std::isfinite(sigma[i]); };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (valid(a) != valid(b)) return valid(a);
    return valid(a) && f[a] < f[b];
  });
  const auto finite = static_cast<std::size_t>(std::count_if(order.begin(), order.end(), valid));

  // Adjacent gaps among the finite, frequency-sorted estimates.
  std::vector<std::size_t> gaps;
  for (std::size_t k = 0; k + 1 < finite; ++k) gaps.push_back(k);
  std::stable_sort(gaps.begin(), gaps.end(), [&](std::size_t a, std::size_t b) {
    return f[order[a + 1]] - f[order[a]] < f[order[b + 1]] - f[order[b]];
  });

  std::vector<bool> used(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> members;
  for (std::size_t k : gaps) {
    if (used[k] || used[k + 1]) continue;
    used[k] = used[k + 1] = true;
    members.emplace_back(order[k], order[k + 1]);
  }
  // Whatever is left (isolated finite estimates, then NaNs) pairs up in
  // sorted order.
  std::optional<std::size_t> pending;
  for (std::size_t k = 0; k < n; ++k) {
    if (used[k]) continue;
    if (pending) {
      members.emplace_back(order[*pending], order[k]);
      pending.reset();
    } else {
      pending = k;
    }
  }

  std::vector<ModePair> out;
  out.reserve(members.size());
  for (auto [a, b] : members) {
    ModePair p;
    p.first = a;
    p.second = b;
    if (valid(a) && valid(b)) {
      p.frequency = 0.5 * (f[a] + f[b]);
      p.damping = 0.5 * (sigma[a] + sigma[b]);
      p.divergence = std::hypot(f[a] - f[b], sigma[a] - sigma[b]);
    } else {
      p.frequency = p.damping = p.divergence = kNaN;
    }
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const ModePair& a, const ModePair& b) {
    const bool fa = std::isfinite(a.frequency);
    const bool fb = std::isfinite(b.frequency);
    if (fa != fb) return fa;
    return fa && a.frequency < b.frequency;
  });
  return out;
}

RowMatrix observation_matrix(const SignalMatrix& x, std::size_t rows, std::size_t delay) {
  const std::size_t q = x.channels();
  const std::size_t per_channel = (rows + q - 1) / q;
  std::vector<EmbeddedObservation> parts;
  parts.reserve(q);
  for (std::size_t i = 0; i < q; ++i) parts.push_back(takens_embed(x.channel(i), per_channel, delay, i));
  const Eigen::Index cols = parts.front().rows.cols();
  RowMatrix out(static_cast<Eigen::Index>(rows), cols);
  Eigen::Index filled = 0;
  for (const EmbeddedObservation& part : parts) {
    const Eigen::Index take = std::min<Eigen::Index>(part.rows.rows(), out.rows() - filled);
    if (take <= 0) break;
    out.middleRows(filled, take) = part.rows.topRows(take);
    filled += take;
  }
  return out;
}

std::vector<DetectedMode> column_minima(const OrderScan& scan, std::size_t nan_guard) {
  std::vector<DetectedMode> out;
  const Eigen::Index rows = scan.divergence.rows();
  for (Eigen::Index col = 0; col < scan.divergence.cols(); ++col) {
    std::size_t nans = 0;
    Eigen::Index best = -1;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double d = scan.divergence(r, col);
      if (std::isnan(d)) {
        ++nans;
        continue;
      }
      if (best < 0 || d < scan.divergence(best, col)) best = r;
    }
    if (nans >= nan_guard || best < 0) continue;
    DetectedMode mode;
    mode.frequency = scan.frequency(best, col);
    mode.damping = scan.damping(best, col);
    mode.divergence = scan.divergence(best, col);
    mode.order_m = static_cast<std::size_t>(best) + 2;
    mode.column = static_cast<std::size_t>(col) + 1;
    out.push_back(mode);
  }
  return out;
}

std::vector<DetectedMode> detect_modes(const OrderScan& scan, const DetectionOptions& options) {
  std::vector<DetectedMode> picks = column_minima(scan, options.nan_guard);
  std::erase_if(picks, [&](const DetectedMode& p) {
    return !(p.divergence <= options.max_relative_divergence * p.frequency);
  });
  std::stable_sort(picks.begin(), picks.end(), [](const DetectedMode& a, const DetectedMode& b) {
    return a.divergence < b.divergence;
  });
  std::vector<DetectedMode> out;
  for (const DetectedMode& p : picks) {
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const DetectedMode& kept) {
      return std::hypot(p.frequency - kept.frequency, p.damping - kept.damping) <= options.merge_radius;
    });
    if (!duplicate) out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const DetectedMode& a, const DetectedMode& b) {
    return a.frequency < b.frequency;
  });
  return out;
}

HobmiResult run_hobmi(const SignalMatrix& x, const HobmiOptions& options) {
  if (options.m_max < 2) throw InputError("m_max must be at least 2");
  if (!x.samples.allFinite()) throw InputError("invalid sample");

  HobmiResult out;
  OrderScan& scan = out.scan;
  scan.m_max = options.m_max;
  scan.window = select_window(x, options.window);

  const SignalMatrix segment(x.samples.middleCols(static_cast<Eigen::Index>(scan.window.begin),
                                                  static_cast<Eigen::Index>(scan.window.size())),
                             x.fs, x.time(scan.window.begin));

  const auto rows = static_cast<Eigen::Index>(options.m_max - 1);
  const auto cols = static_cast<Eigen::Index>(options.m_max);
  scan.frequency = Matrix::Constant(rows, cols, kNaN);
  scan.damping = Matrix::Constant(rows, cols, kNaN);
  scan.divergence = Matrix::Constant(rows, cols, kNaN);

  for (std::size_t m = 2; m <= options.m_max; ++m) {
    const SignalMatrix observed(observation_matrix(segment, 2 * m, options.delay), x.fs, segment.t0);
    const DemixingResult separated = separate(options.method, observed, options.bss);
    const std::vector<ModalOutcome> outcomes = modal_estimates(separated, x.fs, options.trim_frac);

    // Rank-truncated whitening returns fewer than 2m sources; the missing
    // ones count as failed estimates.
    std::vector<double> f(2 * m, kNaN), sigma(2 * m, kNaN);
    for (std::size_t i = 0; i < outcomes.size() && i < 2 * m; ++i) {
      if (!outcomes[i].estimate) continue;
      f[i] = outcomes[i].estimate->frequency;
      sigma[i] = outcomes[i].estimate->damping;
    }
    const std::vector<ModePair> pairs = pair_modes(f, sigma);
    const auto row = static_cast<Eigen::Index>(m - 2);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      scan.frequency(row, col) = pairs[k].frequency;
      scan.damping(row, col) = pairs[k].damping;
      scan.divergence(row, col) = pairs[k].divergence;
    }
  }

  out.modes = detect_modes(scan, options.detection);
  if (out.modes.empty()) throw NumericalError("order undeterminable");
  return out;
}

}  // namespace hobmi
