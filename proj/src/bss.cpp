#include "hobmi/bss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hobmi/copula_stat.hpp"
#include "hobmi/error.hpp"

namespace hobmi {
namespace {

constexpr std::size_t kMinSamples = 30;

void check_input(const SignalMatrix& x) {
  if (x.channels() < 2) throw InputError("need >=2 channels (use Takens embedding)");
  if (x.length() < kMinSamples) throw InputError("signal too short for separation");
  if (!x.samples.allFinite()) throw InputError("invalid sample");
}

std::vector<std::size_t> lag_set(std::size_t samples, const BssOptions& options) {
  const std::size_t count = options.n_lags.value_or(default_lag_count(samples, options.lag_cap));
  if (count == 0) throw InputError("at least one lag is required");
  std::vector<std::size_t> lags(count);
  std::iota(lags.begin(), lags.end(), std::size_t{1});
  return lags;
}

// Jointly diagonalizes `set` (or skips it for a single retained component)
// and assembles W = psi^T W_X, Y = W X.
DemixingResult finish(BssMethod method, const SignalMatrix& x, Whitener whitener,
                      const Matrix& pre, std::vector<Matrix> set, std::vector<std::size_t> lags,
                      const BssOptions& options) {
  DemixingResult out;
  out.method = method;
  out.lags = std::move(lags);
  if (whitener.rank > 1) {
    out.jad = jad(set, options.jad);
  } else {
    out.jad.rotation = Matrix::Identity(1, 1);
    out.jad.off_diag_history = {0.0};
  }
  out.rotation = out.jad.rotation;
  out.demixing = out.rotation.transpose() * whitener.transform * pre;
  out.whitener = std::move(whitener);
  out.sources = out.demixing * x.samples;
  return out;
}

}  // namespace

std::string_view to_string(BssMethod method) {
  return method == BssMethod::Hobi ? "HOBI-HT" : "SOBI-HT";
}

std::size_t default_lag_count(std::size_t samples, std::size_t cap) {
  return std::min(cap, samples / 3 + 1);
}

DemixingResult hobi(const SignalMatrix& x, const BssOptions& options) {
  check_input(x);
  const Eigen::Index q = x.samples.rows();

  Vector scale(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const auto row = x.samples.row(i);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().mean();
    if (!(var > 0.0)) throw InputError("zero-variance input");
    scale(i) = 1.0 / std::sqrt(var);
  }
  const Matrix pre = scale.asDiagonal();
  const RowMatrix standardized = pre * x.samples;

  const Matrix d0 = dependency_matrix(standardized, 0, options.sign).symmetrized();
  Whitener whitener = whiten(eig_sym(d0), options.eps);
  const RowMatrix z = whitener.transform * standardized;

  std::vector<std::size_t> lags = lag_set(x.length(), options);
  std::vector<Matrix> set;
  if (whitener.rank > 1) {
    for (const DependencyMatrix& d : dependency_matrices(z, lags, options.sign)) set.push_back(d.symmetrized());
  }
  return finish(BssMethod::Hobi, x, std::move(whitener), pre, std::move(set), std::move(lags),
                options);
}

DemixingResult sobi(const SignalMatrix& x, const BssOptions& options) {
  check_input(x);
  const Eigen::Index q = x.samples.rows();
  const Eigen::Index t = x.samples.cols();

  const RowMatrix centred = x.samples.colwise() - x.samples.rowwise().mean();
  const Matrix r0 = centred * centred.transpose() / static_cast<double>(t);
  Whitener whitener = whiten(eig_sym(0.5 * (r0 + r0.transpose())), options.eps);
  const RowMatrix z = whitener.transform * centred;

  std::vector<std::size_t> lags = lag_set(x.length(), options);
  std::vector<Matrix> set;
  if (whitener.rank > 1) {
    set.reserve(lags.size());
    for (std::size_t lag : lags) {
      const auto tau = static_cast<Eigen::Index>(lag);
      if (tau + 10 > t) throw InputError("lag too large");
      const Eigen::Index len = t - tau;
      const Matrix r = z.rightCols(len) * z.leftCols(len).transpose() / static_cast<double>(len);
      set.push_back(0.5 * (r + r.transpose()));
    }
  }
  return finish(BssMethod::Sobi, x, std::move(whitener), Matrix::Identity(q, q), std::move(set),
                std::move(lags), options);
}

DemixingResult separate(BssMethod method, const SignalMatrix& x, const BssOptions& options) {
  return method == BssMethod::Hobi ? hobi(x, options) : sobi(x, options);
}

std::vector<ModalOutcome> modal_estimates(const DemixingResult& result, double fs,
                                          double trim_frac) {
  std::vector<ModalOutcome> out;
  const RowMatrix& y = result.sources;
  out.reserve(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    ModalOutcome outcome;
    Vector row = y.row(i).transpose();
    row.array() -= row.mean();
    const double sd = std::sqrt(row.squaredNorm() / static_cast<double>(row.size()));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      outcome.reason = "no oscillation detected";
      out.push_back(std::move(outcome));
      continue;
    }
    row /= sd;
    try {
      outcome.estimate = mode_parameters(std::span<const double>(row.data(), row.size()), fs,
                                         trim_frac);
    } catch (const Error& e) {
      outcome.reason = e.what();
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

double Alignment::min_abs_corr() const {
  return abs_corr.empty() ? 0.0 : *std::min_element(abs_corr.begin(), abs_corr.end());
}

Alignment align_sources(const RowMatrix& y, const RowMatrix& reference) {
  if (y.cols() != reference.cols() || y.rows() < reference.rows() || reference.rows() == 0) {
    throw InputError("shape mismatch");
  }
  auto standardize = [](const RowMatrix& m) {
    RowMatrix c = m.colwise() - m.rowwise().mean();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      const double norm = c.row(i).norm();
      if (norm > 0.0) c.row(i) /= norm;
    }
    return c;
  };
  const Matrix corr = standardize(y) * standardize(reference).transpose();

  const auto ny = static_cast<std::size_t>(y.rows());
  const auto nr = static_cast<std::size_t>(reference.rows());
  Alignment out;
  out.permutation.assign(nr, 0);
  out.signs.assign(nr, 1);
  out.abs_corr.assign(nr, 0.0);
  std::vector<bool> used_y(ny, false), used_ref(nr, false);
  for (std::size_t step = 0; step < nr; ++step) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < ny; ++i) {
      if (used_y[i]) continue;
      for (std::size_t j = 0; j < nr; ++j) {
        if (used_ref[j]) continue;
        const double a = std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        if (a > best) {
          best = a;
          bi = i;
          bj = j;
        }
      }
    }
    used_y[bi] = used_ref[bj] = true;
    out.permutation[bj] = bi;
    out.signs[bj] = corr(static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(bj)) < 0.0 ? -1 : 1;
    out.abs_corr[bj] = best;
  }
  return out;
}

}  // namespace hobmi
