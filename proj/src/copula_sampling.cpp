#include "hobmi/copula_sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

using Rng = std::mt19937_64;

// Uniform on the open interval (0, 1).
double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Positive stable variate with Laplace transform exp(-s^a), 0 < a <= 1
// (Kanter's representation).
double positive_stable(double a, Rng& rng) {
  if (a == 1.0) return 1.0;
  const double w = std::numbers::pi * open_unit(rng);
  const double e = -std::log(open_unit(rng));
  const double left = std::sin(a * w) / std::pow(std::sin(w), 1.0 / a);
  const double right = std::pow(std::sin((1.0 - a) * w) / e, (1.0 - a) / a);
  return left * right;
}

}  // namespace

std::string_view to_string(CopulaKind kind) {
  switch (kind) {
    case CopulaKind::Frank: return "frank";
    case CopulaKind::Clayton: return "clayton";
    case CopulaKind::Gumbel: return "gumbel";
    case CopulaKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

CopulaKind parse_copula_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "frank") return CopulaKind::Frank;
  if (lower == "clayton") return CopulaKind::Clayton;
  if (lower == "gumbel") return CopulaKind::Gumbel;
  if (lower == "gaussian" || lower == "normal") return CopulaKind::Gaussian;
  throw InputError("unknown copula family '" + std::string(name) + "'");
}

void CopulaFamily::validate() const {
  const double p = parameter;
  bool ok = std::isfinite(p);
  switch (kind) {
    case CopulaKind::Frank: ok = ok && p != 0.0; break;
    case CopulaKind::Clayton: ok = ok && p > 0.0; break;
    case CopulaKind::Gumbel: ok = ok && p >= 1.0; break;
    case CopulaKind::Gaussian: ok = ok && p > -1.0 && p < 1.0; break;
  }
  if (!ok) throw InputError("parameter out of range");
}

UniformPairs sample_copula(const CopulaFamily& family, std::size_t n, std::uint64_t seed) {
  family.validate();
  if (n == 0) throw InputError("sample count must be positive");
  Rng rng(seed);
  UniformPairs out;
  out.u.resize(n);
  out.v.resize(n);
  const double alpha = family.parameter;

  switch (family.kind) {
    case CopulaKind::Frank: {
      // Conditional inversion of dC/du.
      const double em1 = std::expm1(-alpha);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = open_unit(rng);
        const double t = open_unit(rng);
        const double v =
            -std::log1p(t * em1 / (t + (1.0 - t) * std::exp(-alpha * u))) / alpha;
        out.u[i] = u;
        out.v[i] = std::clamp(v, 0.0, 1.0);
      }
      break;
    }
    case CopulaKind::Clayton: {
      for (std::size_t i = 0; i < n; ++i) {
        const double u = open_unit(rng);
        const double t = open_unit(rng);
        const double v = std::pow(
            std::pow(u, -alpha) * (std::pow(t, -alpha / (1.0 + alpha)) - 1.0) + 1.0, -1.0 / alpha);
        out.u[i] = u;
        out.v[i] = std::clamp(v, 0.0, 1.0);
      }
      break;
    }
    case CopulaKind::Gumbel: {
      // Marshall-Olkin: frailty V with Laplace transform exp(-s^(1/alpha)).
      const double a = 1.0 / alpha;
      for (std::size_t i = 0; i < n; ++i) {
        const double frailty = positive_stable(a, rng);
        const double e1 = -std::log(open_unit(rng));
        const double e2 = -std::log(open_unit(rng));
        out.u[i] = std::exp(-std::pow(e1 / frailty, a));
        out.v[i] = std::exp(-std::pow(e2 / frailty, a));
      }
      break;
    }
    case CopulaKind::Gaussian: {
      std::normal_distribution<double> normal;
      const double rho = alpha;
      const double tail = std::sqrt(1.0 - rho * rho);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = normal(rng);
        const double z2 = rho * z1 + tail * normal(rng);
        out.u[i] = normal_cdf(z1);
        out.v[i] = normal_cdf(z2);
      }
      break;
    }
  }
  return out;
}

SignalMatrix synth_modal(const std::vector<ModeSpec>& modes, double fs, double duration) {
  if (modes.empty()) throw InputError("no modes given");
  if (!(fs > 0.0) || !(duration > 0.0)) throw InputError("fs and duration must be positive");
  for (const ModeSpec& mode : modes) {
    if (mode.amplitude < 0.0 || mode.frequency < 0.0) throw InputError("invalid mode");
    if (!(fs > 2.0 * mode.frequency)) throw InputError("undersampled");
  }
  const auto samples = static_cast<Eigen::Index>(std::llround(duration * fs));
  RowMatrix x = RowMatrix::Zero(1, std::max<Eigen::Index>(samples, 2));
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double t = static_cast<double>(k) / fs;
    double sum = 0.0;
    for (const ModeSpec& mode : modes) {
      sum += mode.amplitude * std::exp(mode.damping * t) *
             std::sin(2.0 * std::numbers::pi * mode.frequency * t + mode.phase);
    }
    x(0, k) = sum;
  }
  return SignalMatrix(std::move(x), fs);
}

NumericalModel synth_numerical_model(const CopulaFamily& family,
                                     const NumericalModelOptions& options, std::uint64_t seed) {
  constexpr double kDuration = 10.0;
  if (!(options.fs >= 20.0)) throw InputError("numerical model needs fs >= 20 Hz");
  if (!(options.noise_scale >= 0.0)) throw InputError("noise scale must be non-negative");
  const auto samples = static_cast<Eigen::Index>(std::llround(kDuration * options.fs));
  const bool timed = options.decay == DecayReading::TimeDependent;

  RowMatrix clean = RowMatrix::Zero(2, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / options.fs;
    if (t <= 2.0 || t >= 6.0) {
      clean(0, k) = std::exp(-0.01 * (timed ? t : 1.0)) * std::cos(8.0 * t);
    }
    if (t >= 6.0) {
      clean(1, k) = 0.6 * std::exp(-0.03 * (timed ? t : 1.0)) * std::cos(17.0 * t);
    }
  }

  RowMatrix noisy = clean;
  if (options.noise_scale > 0.0) {
    const UniformPairs w = sample_copula(family, static_cast<std::size_t>(samples), seed);
    for (Eigen::Index k = 0; k < samples; ++k) {
      noisy(0, k) += options.noise_scale * (w.u[static_cast<std::size_t>(k)] - 0.5);
      noisy(1, k) += options.noise_scale * (w.v[static_cast<std::size_t>(k)] - 0.5);
    }
  } else {
    family.validate();
  }
  RowMatrix mixture = noisy.colwise().sum();

  return NumericalModel{SignalMatrix(std::move(noisy), options.fs),
                        SignalMatrix(std::move(mixture), options.fs),
                        SignalMatrix(std::move(clean), options.fs)};
}

}  // namespace hobmi
