#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hobmi {

/// y + i H[y], built in the frequency domain.
struct AnalyticSeries {
  std::vector<std::complex<double>> values;
  double fs = 1.0;
};

AnalyticSeries analytic_signal(std::span<const double> y, double fs);

/// Frequency and damping of a (mostly) single-mode signal. `damping` is the
/// slope of the log instantaneous amplitude, so decaying modes are negative.
struct ModeEstimate {
  double frequency = 0.0;  // Hz
  double damping = 0.0;    // 1/s
  double r_squared = 0.0;  // of the log-amplitude fit
  std::size_t first = 0;   // interior sample range used for both fits
  std::size_t last = 0;    // exclusive
};

/// Instantaneous frequency (mean over the interior) and log-amplitude slope.
/// `trim_frac` of the samples is dropped from each end before fitting.
ModeEstimate mode_parameters(std::span<const double> y, double fs, double trim_frac = 0.1);

/// Instantaneous frequency trace in Hz (central differences of the unwrapped
/// phase, one-sided at the ends).
std::vector<double> instantaneous_frequency(const AnalyticSeries& z);

}  // namespace hobmi
