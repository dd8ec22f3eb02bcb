#pragma once

// Blind source separation pipelines: HOBI (copula-statistic dependency
// matrices) and SOBI (lagged covariances), sharing whitening and JAD.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hobmi/copula_stat.hpp"
#include "hobmi/hilbert.hpp"
#include "hobmi/matrix_core.hpp"
#include "hobmi/signal.hpp"

namespace hobmi {

enum class BssMethod { Hobi, Sobi };

std::string_view to_string(BssMethod method);

struct BssOptions {
  /// Number of lags 1..n; defaults to min(lag_cap, floor(T/3) + 1).
  std::optional<std::size_t> n_lags;
  std::size_t lag_cap = 100;
  /// Absolute eigenvalue floor for whitening; relative 1e-9 when unset.
  std::optional<double> eps;
  JadOptions jad;
  /// HOBI entry convention. The unsigned statistic cannot tell positive from
  /// negative dependence, which breaks the orthogonal JAD model; the signed
  /// form is the default.
  DependencySign sign = DependencySign::Spearman;
};

std::size_t default_lag_count(std::size_t samples, std::size_t cap = 100);

struct DemixingResult {
  BssMethod method = BssMethod::Hobi;
  Matrix demixing;  // W, r x q
  Whitener whitener;
  Matrix rotation;  // psi, r x r
  RowMatrix sources;  // Y = W X
  std::vector<std::size_t> lags;
  JadResult jad;
};

/// Copula-statistic separation. Channels are first scaled to unit variance
/// (the scaling is folded into W), so Y = W X holds for the raw input.
DemixingResult hobi(const SignalMatrix& x, const BssOptions& options = {});

/// Second-order baseline: lag-0 covariance whitening and JAD over lagged
/// covariances of the whitened signals.
DemixingResult sobi(const SignalMatrix& x, const BssOptions& options = {});

DemixingResult separate(BssMethod method, const SignalMatrix& x, const BssOptions& options = {});

/// Per-row Hilbert estimate. Rows that fail carry the reason instead.
struct ModalOutcome {
  std::optional<ModeEstimate> estimate;
  std::string reason;
};

/// Each row of Y is centred and scaled to unit variance, then passed to
/// mode_parameters.
std::vector<ModalOutcome> modal_estimates(const DemixingResult& result, double fs,
                                          double trim_frac = 0.1);

/// Greedy maximum-|correlation| matching of recovered rows to reference rows.
struct Alignment {
  std::vector<std::size_t> permutation;  // permutation[j] = row of Y matched to reference j
  std::vector<int> signs;
  std::vector<double> abs_corr;

  double min_abs_corr() const;
};

Alignment align_sources(const RowMatrix& y, const RowMatrix& reference);

}  // namespace hobmi
