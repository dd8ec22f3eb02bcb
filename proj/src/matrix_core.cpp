#include "hobmi/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hobmi/error.hpp"

namespace hobmi {
namespace {

double off_diag_sum(std::span<const Matrix> set) {
  double total = 0.0;
  for (const Matrix& m : set) {
    const double off = off_diag_norm(m);
    total += off * off;
  }
  return total;
}

}  // namespace

double off_diag_norm(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("matrix is not square");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j) sum += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(sum);
}

SymmetricSpectrum eig_sym(const Matrix& d) {
  if (d.rows() != d.cols() || d.rows() == 0) throw InputError("matrix is not square");
  if (!d.allFinite()) throw InputError("invalid matrix");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InputError("matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (d + d.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

  const Eigen::Index q = d.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()(a) > solver.eigenvalues()(b);
  });

  SymmetricSpectrum out{Matrix(q, q), Vector(q)};
  for (Eigen::Index k = 0; k < q; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big) < 0.0) v = -v;
    out.vectors.col(k) = v;
    out.values(k) = solver.eigenvalues()(src);
  }
  return out;
}

Whitener whiten(const SymmetricSpectrum& spectrum, std::optional<double> eps) {
  const Vector& lambda = spectrum.values;
  if (lambda.size() == 0) throw InputError("empty spectrum");
  const double floor = eps.value_or(1e-9 * std::max(lambda.maxCoeff(), 0.0));
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > floor) ++rank;
  }
  if (rank == 0) throw NumericalError("degenerate dependency matrix");

  Whitener w;
  w.rank = rank;
  w.floor = floor;
  w.transform.resize(rank, lambda.size());
  Eigen::Index row = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) <= floor) continue;
    w.transform.row(row++) = spectrum.vectors.col(k).transpose() / std::sqrt(lambda(k));
  }
  return w;
}

JadResult jad(std::span<const Matrix> set, const JadOptions& options) {
  if (set.empty()) throw InputError("empty matrix set");
  const Eigen::Index r = set.front().rows();
  std::vector<Matrix> work;
  work.reserve(set.size());
  for (const Matrix& m : set) {
    if (m.rows() != r || m.cols() != r) throw InputError("ragged matrix set");
    if (!m.allFinite()) throw InputError("invalid matrix");
    work.push_back(0.5 * (m + m.transpose()));
  }

  JadResult out;
  out.rotation = Matrix::Identity(r, r);
  out.off_diag_history.push_back(off_diag_sum(work));

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double largest_angle = 0.0;
    for (Eigen::Index p = 0; p + 1 < r; ++p) {
      for (Eigen::Index q = p + 1; q < r; ++q) {
        // 2x2 Gram matrix of g_k = (M_pp - M_qq, M_pq + M_qp); the optimal
        // angle aligns the rotation with its principal eigenvector.
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const Matrix& m : work) {
          const double a = m(p, p) - m(q, q);
          const double b = m(p, q) + m(q, p);
          g11 += a * a;
          g12 += a * b;
          g22 += b * b;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        largest_angle = std::max(largest_angle, std::abs(theta));
        if (std::abs(theta) < options.tol) continue;

        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (Matrix& m : work) {
          // M <- G^T M G with G = [[c, -s], [s, c]] acting on (p, q).
          const Vector row_p = m.row(p);
          const Vector row_q = m.row(q);
          m.row(p) = c * row_p + s * row_q;
          m.row(q) = -s * row_p + c * row_q;
          const Vector col_p = m.col(p);
          const Vector col_q = m.col(q);
          m.col(p) = c * col_p + s * col_q;
          m.col(q) = -s * col_p + c * col_q;
        }
        const Vector vp = out.rotation.col(p);
        const Vector vq = out.rotation.col(q);
        out.rotation.col(p) = c * vp + s * vq;
        out.rotation.col(q) = -s * vp + c * vq;
      }
    }
    ++out.sweeps;
    out.off_diag_history.push_back(off_diag_sum(work));
    if (largest_angle < options.tol) break;
  }
  return out;
}

}  // namespace hobmi
