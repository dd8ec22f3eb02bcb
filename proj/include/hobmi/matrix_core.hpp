#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hobmi/signal.hpp"

namespace hobmi {

/// Eigenpairs of a symmetric matrix, eigenvalues descending. Each eigenvector
/// has its largest-magnitude component positive.
struct SymmetricSpectrum {
  Matrix vectors;
  Vector values;
};

SymmetricSpectrum eig_sym(const Matrix& d);

/// Whitening transform Lambda_r^{-1/2} P_r^T over the eigenvalues above `floor`.
struct Whitener {
  Matrix transform;  // r x q
  Eigen::Index rank = 0;
  double floor = 0.0;
};

/// Drops eigenpairs with eigenvalue <= eps. Without eps the floor is
/// 1e-9 times the largest eigenvalue.
Whitener whiten(const SymmetricSpectrum& spectrum, std::optional<double> eps = std::nullopt);

struct JadOptions {
  double tol = 1e-8;  // radians
  int max_sweeps = 100;
};

struct JadResult {
  Matrix rotation;                         // psi, r x r orthogonal
  std::vector<double> off_diag_history;    // sum of squared off-diagonals, initial + per sweep
  int sweeps = 0;
};

/// Joint approximate diagonalization by Jacobi (Givens) sweeps: finds an
/// orthogonal psi such that psi^T M_k psi is as diagonal as possible for every
/// k. Inputs are symmetrized before the sweeps.
JadResult jad(std::span<const Matrix> set, const JadOptions& options = {});

/// Frobenius norm with the diagonal zeroed.
double off_diag_norm(const Matrix& m);

}  // namespace hobmi
