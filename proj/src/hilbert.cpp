#include "hobmi/hilbert.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

constexpr std::size_t kMinWindow = 16;
constexpr std::size_t kMinZeroCrossings = 4;

std::vector<double> unwrapped_phase(const std::vector<std::complex<double>>& z) {
  std::vector<double> phase(z.size());
  double offset = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double raw = std::arg(z[k]);
    if (k > 0) {
      const double jump = raw - previous;
      if (jump > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
      if (jump < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
    }
    previous = raw;
    phase[k] = raw + offset;
  }
  return phase;
}

}  // namespace

AnalyticSeries analytic_signal(std::span<const double> y, double fs) {
  const std::size_t n = y.size();
  if (n < kMinWindow) throw InputError("window too short");
  if (!(fs > 0.0)) throw InputError("sampling rate must be positive");

  std::vector<std::complex<double>> input(y.begin(), y.end());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, input);

  // Keep DC (and Nyquist for even n), double positive, zero negative bins.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == half) continue;
    spectrum[k] *= (k <= (n - 1) / 2) ? 2.0 : 0.0;
  }

  AnalyticSeries out;
  out.fs = fs;
  fft.inv(out.values, spectrum);
  for (std::size_t k = 0; k < n; ++k) out.values[k].real(y[k]);
  return out;
}

std::vector<double> instantaneous_frequency(const AnalyticSeries& z) {
  const std::vector<double> phase = unwrapped_phase(z.values);
  const std::size_t n = phase.size();
  const double scale = z.fs / (2.0 * std::numbers::pi);
  std::vector<double> f(n, 0.0);
  if (n < 2) return f;
  f.front() = (phase[1] - phase[0]) * scale;
  f.back() = (phase[n - 1] - phase[n - 2]) * scale;
  for (std::size_t k = 1; k + 1 < n; ++k) f[k] = 0.5 * (phase[k + 1] - phase[k - 1]) * scale;
  return f;
}

ModeEstimate mode_parameters(std::span<const double> y, double fs, double trim_frac) {
  if (!(trim_frac >= 0.0 && trim_frac < 0.5)) throw InputError("trim fraction must be in [0, 0.5)");
  for (double value : y) {
    if (!std::isfinite(value)) throw InputError("invalid sample");
  }
  const AnalyticSeries z = analytic_signal(y, fs);
  const std::size_t n = y.size();
  const auto trim = static_cast<std::size_t>(std::floor(trim_frac * static_cast<double>(n)));
  const std::size_t first = trim;
  const std::size_t last = n - trim;
  if (last - first < 3) throw InputError("window too short");

  std::size_t crossings = 0;
  int previous_sign = 0;
  for (std::size_t k = first; k < last; ++k) {
    const int sign = (y[k] > 0.0) - (y[k] < 0.0);
    if (sign == 0) continue;
    if (previous_sign != 0 && sign != previous_sign) ++crossings;
    previous_sign = sign;
  }
  if (crossings < kMinZeroCrossings) throw NumericalError("no oscillation detected");

  const std::vector<double> inst = instantaneous_frequency(z);
  double f_sum = 0.0;
  for (std::size_t k = first; k < last; ++k) f_sum += inst[k];
  const double count = static_cast<double>(last - first);
  const double frequency = f_sum / count;
  if (!(frequency > 0.0)) throw NumericalError("no oscillation detected");

  // Least-squares line through (t, ln|z|).
  double st = 0.0, sa = 0.0;
  std::vector<double> log_amp(last - first);
  for (std::size_t k = first; k < last; ++k) {
    const double a = std::abs(z.values[k]);
    if (!(a > 0.0)) throw NumericalError("amplitude degenerate");
    log_amp[k - first] = std::log(a);
    st += static_cast<double>(k) / fs;
    sa += log_amp[k - first];
  }
  const double t_mean = st / count;
  const double a_mean = sa / count;
  double stt = 0.0, sta = 0.0, saa = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double dt = static_cast<double>(k) / fs - t_mean;
    const double da = log_amp[k - first] - a_mean;
    stt += dt * dt;
    sta += dt * da;
    saa += da * da;
  }
  ModeEstimate out;
  out.frequency = frequency;
  out.damping = sta / stt;
  out.r_squared = saa > 0.0 ? (sta * sta) / (stt * saa) : 1.0;
  out.first = first;
  out.last = last;
  return out;
}

}  // namespace hobmi
