#pragma once

// Dependent uniform pairs from one-parameter bivariate copulas, and the
// synthetic ringdown signals built on top of them.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hobmi/signal.hpp"

namespace hobmi {

enum class CopulaKind { Frank, Clayton, Gumbel, Gaussian };

std::string_view to_string(CopulaKind kind);
CopulaKind parse_copula_kind(std::string_view name);

/// A copula family with its single parameter: alpha for the Archimedean
/// families, the correlation rho for the Gaussian one.
struct CopulaFamily {
  CopulaKind kind = CopulaKind::Frank;
  double parameter = 10.0;

  void validate() const;
};

struct UniformPairs {
  std::vector<double> u;
  std::vector<double> v;
};

/// n pairs with uniform marginals and the family's dependence. Deterministic
/// for a given seed.
UniformPairs sample_copula(const CopulaFamily& family, std::size_t n, std::uint64_t seed);

/// A x exp(damping t) sin(2 pi f t + phase).
struct ModeSpec {
  double amplitude = 1.0;
  double damping = 0.0;    // 1/s, negative decays
  double frequency = 1.0;  // Hz
  double phase = 0.0;      // rad
};

/// Sum of damped sinusoids sampled on [0, duration) at fs, as one channel.
SignalMatrix synth_modal(const std::vector<ModeSpec>& modes, double fs, double duration);

/// Decay reading of the two-tone numerical model. `TimeDependent` uses
/// exp(-0.01 t) and exp(-0.03 t); `Constant` multiplies by the constants
/// exp(-0.01) and exp(-0.03) literally.
enum class DecayReading { TimeDependent, Constant };

struct NumericalModelOptions {
  double fs = 100.0;
  double noise_scale = 0.1;
  DecayReading decay = DecayReading::TimeDependent;
};

struct NumericalModel {
  SignalMatrix sources;   // s1, s2 (2 x T)
  SignalMatrix mixture;   // x = s1 + s2 (1 x T)
  SignalMatrix baseline;  // noiseless x1, x2 (2 x T)
};

/// The 10 s two-source model: x1 active on [0,2] and [6,10], x2 on [6,10],
/// noise pairs drawn from `family`, centred and scaled by noise_scale.
NumericalModel synth_numerical_model(const CopulaFamily& family,
                                     const NumericalModelOptions& options, std::uint64_t seed);

}  // namespace hobmi
