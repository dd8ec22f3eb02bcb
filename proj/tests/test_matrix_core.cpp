#include <doctest.h>

#include <cmath>
#include <limits>

#include "hobmi/error.hpp"
#include "hobmi/matrix_core.hpp"
#include "support.hpp"

using namespace hobmi;

namespace {

// |A^T B| is a signed permutation when the columns agree up to order and sign.
double permutation_gap(const Matrix& a, const Matrix& b) {
  const Matrix c = (a.transpose() * b).cwiseAbs();
  double gap = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    gap = std::max(gap, 1.0 - c.row(i).maxCoeff());
    gap = std::max(gap, 1.0 - c.col(i).maxCoeff());
  }
  return gap;
}

double orthogonality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace

TEST_CASE("eig_sym") {
  SUBCASE("identity") {
    const auto s = eig_sym(Matrix::Identity(4, 4));
    CHECK(s.values.isApproxToConstant(1.0));
    CHECK(s.vectors.isApprox(Matrix::Identity(4, 4)));
  }
  SUBCASE("diagonal") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 4;
    const auto s = eig_sym(d);
    CHECK(s.values(0) == doctest::Approx(4));
    CHECK(s.values(1) == doctest::Approx(1));
    CHECK(s.vectors(1, 0) == doctest::Approx(1));
  }
  SUBCASE("random symmetric") {
    testing::Gen g(41);
    for (int trial = 0; trial < 25; ++trial) {
      const auto q = static_cast<Eigen::Index>(g.index(1, 9));
      const Matrix d = g.symmetric(q);
      const auto s = eig_sym(d);
      CHECK(orthogonality_error(s.vectors) < 1e-10);
      CHECK((s.vectors * s.values.asDiagonal() * s.vectors.transpose() - d).norm() < 1e-8);
      for (Eigen::Index k = 0; k + 1 < q; ++k) CHECK(s.values(k) >= s.values(k + 1));
      for (Eigen::Index k = 0; k < q; ++k) {
        Eigen::Index big = 0;
        s.vectors.col(k).cwiseAbs().maxCoeff(&big);
        CHECK(s.vectors(big, k) > 0.0);
      }
    }
  }
  SUBCASE("errors") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(eig_sym(bad), "invalid matrix", InputError);
    CHECK_THROWS_AS(eig_sym(Matrix::Zero(2, 3)), InputError);
  }
}

TEST_CASE("whiten") {
  SUBCASE("identity") {
    const auto w = whiten(eig_sym(Matrix::Identity(3, 3)), 1e-12);
    CHECK(w.rank == 3);
    CHECK(w.transform.isApprox(Matrix::Identity(3, 3)));
  }
  SUBCASE("diag(4, 1)") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 1;
    const auto w = whiten(eig_sym(d), 1e-12);
    CHECK(w.transform(0, 0) == doctest::Approx(0.5));
    CHECK(w.transform(1, 1) == doctest::Approx(1.0));
    CHECK(std::abs(w.transform(0, 1)) < 1e-15);
  }
  SUBCASE("rank truncation") {
    SymmetricSpectrum s{Matrix::Identity(2, 2), Vector(2)};
    s.values << 2.0, 1e-15;
    CHECK(whiten(s, 1e-9).rank == 1);
    CHECK(whiten(s).rank == 1);
    s.values << 1e-12, 0.0;
    CHECK_THROWS_WITH_AS(whiten(s, 1e-9), "degenerate dependency matrix", NumericalError);
  }
  SUBCASE("whitening identity") {
    testing::Gen g(43);
    for (int trial = 0; trial < 20; ++trial) {
      const auto q = static_cast<Eigen::Index>(g.index(2, 8));
      const Matrix a = g.gaussian(q, q + 3);
      const Matrix d = a * a.transpose();
      const auto w = whiten(eig_sym(d));
      CHECK((w.transform * d * w.transform.transpose() - Matrix::Identity(w.rank, w.rank)).norm() < 1e-8);
    }
  }
}

TEST_CASE("off_diag_norm") {
  CHECK(off_diag_norm(Vector::LinSpaced(4, 1, 4).asDiagonal().toDenseMatrix()) == 0.0);
  Matrix m(2, 2);
  m << 0, 3, 4, 0;
  CHECK(off_diag_norm(m) == doctest::Approx(5.0));
  testing::Gen g(47);
  const Matrix r = g.gaussian(6, 6);
  const double expect = std::sqrt(r.squaredNorm() - r.diagonal().squaredNorm());
  CHECK(off_diag_norm(r) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("jad") {
  SUBCASE("already diagonal") {
    Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
    a.diagonal() << 1, 2;
    b.diagonal() << 3, 4;
    const std::vector<Matrix> set{a, b};
    const auto r = jad(set);
    CHECK(permutation_gap(r.rotation, Matrix::Identity(2, 2)) < 1e-12);
    CHECK(r.off_diag_history.back() == 0.0);
  }
  SUBCASE("commuting sets recover the shared basis") {
    testing::Gen g(53);
    for (int trial = 0; trial < 20; ++trial) {
      const auto r = static_cast<Eigen::Index>(g.index(2, 8));
      const Matrix q = g.orthogonal(r);
      std::vector<Matrix> set;
      const std::size_t count = g.index(2, 6);
      for (std::size_t k = 0; k < count; ++k) {
        set.push_back(q * g.gaussian(r, 1).asDiagonal() * q.transpose());
      }
      const auto res = jad(set);
      CAPTURE(trial);
      CHECK(orthogonality_error(res.rotation) < 1e-10);
      CHECK(res.off_diag_history.back() < 1e-8);
      CHECK(permutation_gap(res.rotation, q) < 1e-6);
      for (std::size_t s = 1; s < res.off_diag_history.size(); ++s) {
        CHECK(res.off_diag_history[s] <= res.off_diag_history[s - 1] * (1 + 1e-12) + 1e-300);
      }
    }
  }
  SUBCASE("single matrix agrees with eig_sym") {
    testing::Gen g(59);
    for (int trial = 0; trial < 10; ++trial) {
      const auto r = static_cast<Eigen::Index>(g.index(2, 7));
      const Matrix d = g.symmetric(r);
      const std::vector<Matrix> set{d};
      const auto res = jad(set);
      CHECK(permutation_gap(res.rotation, eig_sym(d).vectors) < 1e-6);
    }
  }
  SUBCASE("noisy sets never increase the criterion") {
    testing::Gen g(61);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index r = 5;
      std::vector<Matrix> set;
      for (int k = 0; k < 4; ++k) set.push_back(g.gaussian(r, r));
      const auto res = jad(set);
      CHECK(orthogonality_error(res.rotation) < 1e-10);
      for (std::size_t s = 1; s < res.off_diag_history.size(); ++s) {
        CHECK(res.off_diag_history[s] <= res.off_diag_history[s - 1] * (1 + 1e-12));
      }
      double direct = 0.0;
      for (const Matrix& m : set) {
        const Matrix sym = 0.5 * (m + m.transpose());
        const double o = off_diag_norm(res.rotation.transpose() * sym * res.rotation);
        direct += o * o;
      }
      CHECK(direct == doctest::Approx(res.off_diag_history.back()).epsilon(1e-9));
    }
  }
  SUBCASE("errors") {
    const std::vector<Matrix> ragged{Matrix::Identity(2, 2), Matrix::Identity(3, 3)};
    CHECK_THROWS_WITH_AS(jad(ragged), "ragged matrix set", InputError);
    CHECK_THROWS_AS(jad(std::vector<Matrix>{}), InputError);
  }
}
