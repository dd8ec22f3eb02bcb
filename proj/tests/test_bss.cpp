#include <doctest.h>

#include <cmath>

#include "hobmi/bss.hpp"
#include "hobmi/copula_sampling.hpp"
#include "hobmi/error.hpp"
#include "hobmi/experiments.hpp"
#include "hobmi/order_id.hpp"
#include "support.hpp"

using namespace hobmi;

namespace {

// Two damped tones plus independent Gaussian noise, 20 Hz, 20 s.
RowMatrix two_sources(testing::Gen& g, double noise) {
  const auto a = synth_modal({{1.0, -0.05, 0.7, 0.0}}, 20, 20);
  const auto b = synth_modal({{1.0, -0.1, 1.6, 1.0}}, 20, 20);
  RowMatrix s(2, a.length());
  for (Eigen::Index k = 0; k < s.cols(); ++k) {
    s(0, k) = a.samples(0, k) + noise * g.normal();
    s(1, k) = b.samples(0, k) + noise * g.normal();
  }
  return s;
}

}  // namespace

TEST_CASE("lag count") {
  CHECK(default_lag_count(30) == 11);
  CHECK(default_lag_count(400) == 100);
  CHECK(default_lag_count(297) == 100);
  CHECK(default_lag_count(296) == 99);
  CHECK(default_lag_count(400, 20) == 20);
}

TEST_CASE("identity mixing") {
  testing::Gen g(79);
  const RowMatrix s = two_sources(g, 0.1);
  const SignalMatrix x(s, 20.0);
  for (auto method : {BssMethod::Hobi, BssMethod::Sobi}) {
    CAPTURE(to_string(method));
    const auto res = separate(method, x);
    CHECK(align_sources(res.sources, s).min_abs_corr() >= 0.99);
  }
}

TEST_CASE("Gaussian independent sources with SOBI") {
  testing::Gen g(83);
  RowMatrix s(2, 2000);
  // AR(1) rows with different memory so the lagged covariances differ
  double a = 0, b = 0;
  for (Eigen::Index k = 0; k < s.cols(); ++k) {
    a = 0.95 * a + g.normal();
    b = -0.5 * b + g.normal();
    s(0, k) = a;
    s(1, k) = b;
  }
  const auto res = sobi(SignalMatrix(s, 1.0));
  CHECK(align_sources(res.sources, s).min_abs_corr() >= 0.99);
}

TEST_CASE("random well-conditioned mixing") {
  int hobi_ok = 0, sobi_ok = 0;
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    testing::Gen g(seed);
    const RowMatrix s = two_sources(g, 0.1);
    const Matrix a = g.mixing(2);
    const SignalMatrix x(a * s, 20.0);
    hobi_ok += align_sources(hobi(x).sources, s).min_abs_corr() >= 0.95;
    sobi_ok += align_sources(sobi(x).sources, s).min_abs_corr() >= 0.95;
  }
  CHECK(hobi_ok >= 5);
  CHECK(sobi_ok >= 5);
}

TEST_CASE("demixing bookkeeping") {
  testing::Gen g(89);
  const RowMatrix s = two_sources(g, 0.1);
  const SignalMatrix x(g.mixing(2) * s, 20.0);
  for (auto method : {BssMethod::Hobi, BssMethod::Sobi}) {
    const auto res = separate(method, x);
    const RowMatrix y = res.demixing * x.samples;
    CHECK(y == res.sources);
    CHECK(res.demixing.rows() == res.whitener.rank);
    CHECK(res.demixing.rows() <= 2);
    CHECK(res.lags.size() == default_lag_count(x.length()));
    CHECK(res.lags.front() == 1);
    CHECK((res.rotation.transpose() * res.rotation - Matrix::Identity(2, 2)).norm() < 1e-10);
  }
  BssOptions o;
  o.n_lags = 5;
  CHECK(hobi(x, o).lags.size() == 5);
}

TEST_CASE("channel scaling equivariance") {
  testing::Gen g(97);
  for (int trial = 0; trial < 3; ++trial) {
    const RowMatrix s = two_sources(g, 0.1);
    const Matrix a = g.mixing(2);
    const SignalMatrix x(a * s, 20.0);
    RowMatrix scaled_samples = x.samples;
    const double c = std::exp(g.uniform(-3, 3));
    scaled_samples.row(1) *= c;
    const SignalMatrix scaled(scaled_samples, 20.0);
    for (auto method : {BssMethod::Hobi, BssMethod::Sobi}) {
      CAPTURE(to_string(method));
      const auto base = align_sources(separate(method, x).sources, s);
      const auto other = align_sources(separate(method, scaled).sources, s);
      for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(base.abs_corr[j] - other.abs_corr[j]) <= 1e-6);
    }
  }
}

TEST_CASE("HOBI and SOBI agree under orthogonal mixing") {
  testing::Gen g(101);
  for (int trial = 0; trial < 3; ++trial) {
    const RowMatrix s = two_sources(g, 0.05);
    const SignalMatrix x(g.orthogonal(2) * s, 20.0);
    const auto h = hobi(x), so = sobi(x);
    CHECK(align_sources(h.sources, so.sources).min_abs_corr() >= 0.95);
  }
}

TEST_CASE("single channel is rejected") {
  const auto x = synth_modal({{1.0, -0.1, 1.0, 0.0}}, 20, 10);
  CHECK_THROWS_WITH_AS(hobi(x), "need >=2 channels (use Takens embedding)", InputError);
  CHECK_THROWS_AS(sobi(x), InputError);
}

TEST_CASE("modal estimates") {
  DemixingResult res;
  res.sources = RowMatrix::Zero(2, 400);
  const auto tone = testing::damped_tone(1.3, -0.15, 20.0, 400);
  for (int k = 0; k < 400; ++k) res.sources(0, k) = 3.0 * tone[k];
  const auto out = modal_estimates(res, 20.0);
  REQUIRE(out.size() == 2);
  REQUIRE(out[0].estimate.has_value());
  CHECK(out[0].estimate->frequency == doctest::Approx(1.3).epsilon(0.01));
  CHECK(out[0].estimate->damping == doctest::Approx(-0.15).epsilon(0.05));
  CHECK_FALSE(out[1].estimate.has_value());
  CHECK(out[1].reason == "no oscillation detected");
}

TEST_CASE("embedded noiseless numerical model") {
  NumericalModelOptions o;
  o.noise_scale = 0.0;
  const auto model = synth_numerical_model({CopulaKind::Frank, 10.0}, o, 7);
  const double baseline = mode_parameters(model.sources.channel(0), 100.0).frequency;
  for (auto method : {BssMethod::Hobi, BssMethod::Sobi}) {
    CAPTURE(to_string(method));
    const auto emb = takens_embed(model.mixture.channel(0), 4);
    const auto res = separate(method, SignalMatrix(emb.rows, 100.0));
    double best = INFINITY;
    for (const auto& m : modal_estimates(res, 100.0)) {
      if (m.estimate) best = std::min(best, std::abs(m.estimate->frequency - baseline));
    }
    CHECK(best <= 0.01 * baseline);
  }
}

TEST_CASE("alignment") {
  testing::Gen g(103);
  const RowMatrix s = g.gaussian(2, 500);
  SUBCASE("identity") {
    const auto a = align_sources(s, s);
    CHECK(a.permutation == std::vector<std::size_t>{0, 1});
    CHECK(a.signs == std::vector<int>{1, 1});
    CHECK(a.min_abs_corr() == doctest::Approx(1.0));
  }
  SUBCASE("negated and swapped") {
    RowMatrix y(2, 500);
    y.row(0) = -s.row(1);
    y.row(1) = -s.row(0);
    const auto a = align_sources(y, s);
    CHECK(a.permutation == std::vector<std::size_t>{1, 0});
    CHECK(a.signs == std::vector<int>{-1, -1});
    CHECK(a.min_abs_corr() == doctest::Approx(1.0));
  }
  SUBCASE("independent rows") {
    double total = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = align_sources(g.gaussian(2, 500), s);
      total += a.abs_corr[0] + a.abs_corr[1];
    }
    CHECK(total / 40 < 0.1);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_WITH_AS(align_sources(g.gaussian(2, 499), s), "shape mismatch", InputError);
  }
}
