#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

namespace hobmi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// q channels by T samples on a uniform grid.
///
/// Samples are stored row-major so that each channel is contiguous and can be
/// handed to the scalar routines as a std::span.
struct SignalMatrix {
  RowMatrix samples;
  double fs = 1.0;
  double t0 = 0.0;

  SignalMatrix() = default;
  SignalMatrix(RowMatrix s, double rate, double start = 0.0);

  std::size_t channels() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(samples.cols()); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) / fs; }

  std::span<const double> channel(std::size_t i) const {
    return {samples.data() + i * length(), length()};
  }
};

}  // namespace hobmi
