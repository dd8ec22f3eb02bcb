#pragma once

// Copula statistic (CoS): a [0,1] dependence index built from the distance of
// the empirical copula to the Frechet-Hoeffding bounds, relative to the
// independence copula.

#include <cstddef>
#include <span>
#include <vector>

#include "hobmi/signal.hpp"

namespace hobmi {

/// Normalized ranks of a bivariate sample. Ties are broken by sample index,
/// so u and v are always permutations of {1/n, ..., n/n}.
struct PseudoObservations {
  std::vector<double> u;
  std::vector<double> v;
  std::size_t n = 0;
};

PseudoObservations pseudo_observations(std::span<const double> x, std::span<const double> y);

/// C_n(u, v) = (1/n) #{j : u_j <= u and v_j <= v}.
double empirical_copula(const PseudoObservations& p, double u, double v);

/// Relative distance of a copula value to the independence copula, scaled by
/// the Frechet bound on the same side. Always in [0, 1].
double frechet_ratio(double c, double u, double v);

/// One monotone run of the empirical copula evaluated along the u-sorted
/// sample. Adjacent domains share their boundary point.
struct CosDomain {
  std::size_t first = 0;  // index into the u-sorted sequence
  std::size_t last = 0;   // inclusive
  std::size_t count = 0;  // n_i = last - first + 1
  std::size_t argmin = 0;
  std::size_t argmax = 0;
  double c_min = 0.0;
  double c_max = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool local_optimum = false;
  double gamma = 0.0;
};

struct CosBreakdown {
  std::size_t n = 0;
  std::vector<CosDomain> domains;
  double value = 0.0;

  std::size_t m() const { return domains.size(); }
  /// (sum n_i gamma_i) / (n + m - 1), recomputed from the domain fields.
  double aggregate() const;
};

/// Full CoS procedure with the per-domain breakdown.
CosBreakdown copula_statistic_breakdown(std::span<const double> x, std::span<const double> y);

/// CoS value only.
double copula_statistic(std::span<const double> x, std::span<const double> y);

/// q x q CoS matrix at a given lag. Entry (i, j) pairs x_i shifted forward by
/// `lag` samples with x_j truncated by `lag` samples at the end. The raw entries
/// are not symmetric; consumers use symmetrized().
struct DependencyMatrix {
  Matrix entries;
  std::size_t lag = 0;

  Matrix symmetrized() const { return 0.5 * (entries + entries.transpose()); }
};

/// Entry convention: the plain statistic in [0, 1], or the statistic carrying
/// the sign of the Spearman rank correlation of the same pair (in [-1, 1]).
enum class DependencySign { Unsigned, Spearman };

DependencyMatrix dependency_matrix(const RowMatrix& x, std::size_t lag,
                                   DependencySign sign = DependencySign::Unsigned);

/// Lagged dependency matrices for every lag in `lags`, evaluated in parallel.
std::vector<DependencyMatrix> dependency_matrices(const RowMatrix& x,
                                                  std::span<const std::size_t> lags,
                                                  DependencySign sign = DependencySign::Unsigned);

}  // namespace hobmi
