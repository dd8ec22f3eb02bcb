#pragma once
// Generators and reference computations shared by the test binaries.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hobmi/signal.hpp"

namespace testing {

using hobmi::Matrix;
using hobmi::RowMatrix;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>()(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::vector<double> uniforms(std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = uniform();
    return out;
  }
  std::vector<double> normals(std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = normal();
    return out;
  }

  Matrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Matrix orthogonal(Eigen::Index r) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(r, r));
    Matrix q = qr.householderQ();
    return q;
  }

  Matrix symmetric(Eigen::Index r) {
    const Matrix g = gaussian(r, r);
    return 0.5 * (g + g.transpose());
  }

  // Square mixing matrix with condition number below `max_cond`.
  Matrix mixing(Eigen::Index q, double max_cond = 10.0) {
    while (true) {
      Matrix a = gaussian(q, q);
      Eigen::JacobiSVD<Matrix> svd(a);
      const auto s = svd.singularValues();
      if (s(0) / s(q - 1) < max_cond) return a;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<double> row_vector(const RowMatrix& m, Eigen::Index i) {
  return {m.row(i).data(), m.row(i).data() + m.cols()};
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// O(n^2) Kendall tau (tau-a; continuous samples have no ties).
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long long s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = (x[i] - x[j]) * (y[i] - y[j]);
      s += (a > 0) - (a < 0);
    }
  }
  return 2.0 * static_cast<double>(s) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

// First Debye function D1(a) = (1/a) * int_0^a t / (e^t - 1) dt, Simpson rule.
inline double debye1(double a) {
  const int steps = 20000;
  const double h = a / steps;
  auto f = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  double sum = f(0.0) + f(a);
  for (int k = 1; k < steps; ++k) sum += f(k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0 / a;
}

// Kolmogorov-Smirnov distance of a sample to U(0,1).
inline double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    d = std::max(d, std::max(static_cast<double>(k + 1) / n - u[k], u[k] - static_cast<double>(k) / n));
  }
  return d;
}

// Damped tone e^{sigma t} sin(2 pi f t + phase).
inline std::vector<double> damped_tone(double f, double sigma, double fs, std::size_t n, double phase = 0.0) {
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / fs;
    y[k] = std::exp(sigma * t) * std::sin(2.0 * std::numbers::pi * f * t + phase);
  }
  return y;
}

// Best |corr| of each reference row against any recovered row.
inline std::vector<double> best_abs_corr(const RowMatrix& y, const RowMatrix& ref) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < ref.rows(); ++j) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      best = std::max(best, std::abs(pearson(row_vector(y, i), row_vector(ref, j))));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace testing
