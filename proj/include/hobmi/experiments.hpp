#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hobmi/bss.hpp"
#include "hobmi/copula_sampling.hpp"
#include "hobmi/dataset.hpp"
#include "hobmi/order_id.hpp"
#include "hobmi/report.hpp"

namespace hobmi {

/// Frank(10), Clayton(10), Gumbel(10), Gaussian(0.9).
std::vector<CopulaFamily> table1_families();

struct Table1Options {
  std::uint64_t seed = 7;
  std::size_t seed_count = 1;  // seeds seed, seed+1, ...
  double noise_scale = 0.1;
  double fs = 100.0;
  DecayReading decay = DecayReading::TimeDependent;
  std::vector<CopulaFamily> families = table1_families();
  std::size_t embedding = 4;  // rows of the delay embedding, two per mode
  std::size_t delay = 1;
  BssOptions bss;
  double trim_frac = 0.1;
};

/// Single-channel separation: delay-embed, separate, Hilbert each source and
/// pair the estimates (ascending frequency).
std::vector<ModePair> embedded_modes(BssMethod method, std::span<const double> x, double fs,
                                     std::size_t embedding, std::size_t delay,
                                     const BssOptions& bss = {}, double trim_frac = 0.1);

/// Numerical-model comparison of HOBI-HT and SOBI-HT against Hilbert
/// estimates of the sources themselves, per family and seed, with a count of
/// seeds where HOBI-HT's second mode lies nearer the baseline.
RunReport run_table1(const Table1Options& options = {});

enum class CaseMethod { Hobmi, HobiHt, SobiHt };

struct ReferenceMode {
  double frequency = 0.0;
  double damping = 0.0;
};

struct CaseOptions {
  CaseMethod method = CaseMethod::Hobmi;
  HobmiOptions hobmi;
  /// Embedding rows used by HOBI-HT/SOBI-HT on single-channel data.
  std::size_t embedding = 4;
};

/// Each reference is matched to a distinct estimate so that the number of
/// matches is maximal and, among those, the summed relative frequency error
/// is minimal.
std::vector<ReferenceError> match_reference(std::span<const ReportMode> modes,
                                            std::span<const ReferenceMode> reference);

RunReport run_casestudy(const Dataset& data, const CaseOptions& options = {},
                        const std::optional<std::vector<ReferenceMode>>& reference = std::nullopt);

enum class CaseStudy { A, B };

/// Linear-eigenvalue reference modes of the two-area test system (three
/// electromechanical modes, fastest first).
std::vector<ReferenceMode> lea_reference(CaseStudy which);

/// Published HOBMI estimates for the same cases.
std::vector<ReferenceMode> published_hobmi(CaseStudy which);

/// Two-channel stand-in for the w24/w14 speed records: the reference modes
/// switched on at fault clearing, plus Frank(10) copula noise.
Dataset case_surrogate(CaseStudy which, std::uint64_t seed = 11);

/// HOBMI settings used with the surrogates: delay 6 samples, 6 s window.
HobmiOptions case_hobmi_options();

}  // namespace hobmi
