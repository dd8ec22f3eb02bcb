#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hobmi/copula_sampling.hpp"
#include "hobmi/error.hpp"
#include "hobmi/hilbert.hpp"
#include "support.hpp"

using namespace hobmi;

namespace {

double closed_form_tau(const CopulaFamily& f) {
  const double a = f.parameter;
  switch (f.kind) {
    case CopulaKind::Clayton: return a / (a + 2.0);
    case CopulaKind::Gumbel: return 1.0 - 1.0 / a;
    case CopulaKind::Gaussian: return 2.0 / std::numbers::pi * std::asin(a);
    case CopulaKind::Frank: return 1.0 - 4.0 / a * (1.0 - testing::debye1(a));
  }
  return NAN;
}

}  // namespace

TEST_CASE("Debye oracle") {
  // D1(1) from the series 1 - x/4 + x^2/36 - x^4/3600 + x^6/211680
  CHECK(testing::debye1(1.0) == doctest::Approx(1 - 0.25 + 1.0 / 36 - 1.0 / 3600 + 1.0 / 211680).epsilon(1e-7));
  CHECK(testing::debye1(1e-4) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Kendall tau matches the closed form") {
  const CopulaFamily families[] = {
      {CopulaKind::Clayton, 10.0}, {CopulaKind::Gumbel, 10.0}, {CopulaKind::Gaussian, 0.9},
      {CopulaKind::Frank, 10.0},   {CopulaKind::Clayton, 2.0}, {CopulaKind::Gumbel, 1.5},
      {CopulaKind::Gaussian, -0.5}, {CopulaKind::Frank, -4.0}};
  for (const auto& f : families) {
    CAPTURE(to_string(f.kind));
    CAPTURE(f.parameter);
    const auto s = sample_copula(f, 5000, 101);
    CHECK(std::abs(testing::kendall_tau(s.u, s.v) - closed_form_tau(f)) <= 0.03);
  }
  CHECK(closed_form_tau({CopulaKind::Clayton, 10.0}) == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(closed_form_tau({CopulaKind::Gaussian, 0.9}) == doctest::Approx(0.7129).epsilon(1e-4));
}

TEST_CASE("uniform marginals") {
  const double critical = 1.63 / std::sqrt(5000.0);
  for (auto kind : {CopulaKind::Frank, CopulaKind::Clayton, CopulaKind::Gumbel, CopulaKind::Gaussian}) {
    const CopulaFamily f{kind, kind == CopulaKind::Gaussian ? 0.9 : 10.0};
    double du = 0.0, dv = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = sample_copula(f, 5000, seed);
      du += testing::ks_uniform(s.u);
      dv += testing::ks_uniform(s.v);
      for (double v : s.u) REQUIRE((v >= 0.0 && v <= 1.0));
    }
    CAPTURE(to_string(kind));
    CHECK(du / 5 < critical);
    CHECK(dv / 5 < critical);
  }
}

TEST_CASE("sampler determinism") {
  const CopulaFamily f{CopulaKind::Gumbel, 3.0};
  const auto a = sample_copula(f, 500, 9);
  const auto b = sample_copula(f, 500, 9);
  const auto c = sample_copula(f, 500, 10);
  CHECK(a.u == b.u);
  CHECK(a.v == b.v);
  CHECK(a.u != c.u);
}

TEST_CASE("family parameters") {
  CHECK_THROWS_WITH_AS(sample_copula({CopulaKind::Clayton, 0.0}, 10, 1), "parameter out of range", InputError);
  CHECK_THROWS_AS(sample_copula({CopulaKind::Gumbel, 0.5}, 10, 1), InputError);
  CHECK_THROWS_AS(sample_copula({CopulaKind::Frank, 0.0}, 10, 1), InputError);
  CHECK_THROWS_AS(sample_copula({CopulaKind::Gaussian, 1.0}, 10, 1), InputError);
  CHECK_NOTHROW(sample_copula({CopulaKind::Gumbel, 1.0}, 10, 1));
  CHECK(parse_copula_kind("clayton") == CopulaKind::Clayton);
  CHECK(to_string(CopulaKind::Frank) == "frank");
  CHECK_THROWS_AS(parse_copula_kind("student"), InputError);
}

TEST_CASE("modal synthesis") {
  SUBCASE("phase pi/2 starts at the amplitude") {
    const auto x = synth_modal({{1.0, 0.0, 1.0, std::numbers::pi / 2}}, 100, 1);
    CHECK(x.samples(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("zero phases start at zero") {
    const auto x = synth_modal({{1.0, -0.2, 1.0, 0.0}, {2.0, -0.1, 3.0, 0.0}}, 100, 1);
    CHECK(x.samples(0, 0) == 0.0);
  }
  SUBCASE("grid and superposition") {
    const ModeSpec a{1.0, -0.1, 0.7, 0.3}, b{0.5, -0.2, 1.9, 1.0};
    const auto both = synth_modal({a, b}, 20, 10);
    const auto xa = synth_modal({a}, 20, 10), xb = synth_modal({b}, 20, 10);
    CHECK(both.length() == 200);
    CHECK(both.fs == 20.0);
    CHECK((both.samples - xa.samples - xb.samples).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("components round-trip through the Hilbert estimator") {
    const ModeSpec modes[] = {{1.0, -0.1, 0.7, 0.3}, {0.5, -0.2, 1.9, 1.0}};
    for (const auto& m : modes) {
      const auto x = synth_modal({m}, 20, 20);
      const auto e = mode_parameters(x.channel(0), x.fs);
      CHECK(e.frequency == doctest::Approx(m.frequency).epsilon(0.01));
      CHECK(std::abs(e.damping - m.damping) <= std::max(0.05 * std::abs(m.damping), 0.01));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_WITH_AS(synth_modal({{1.0, 0.0, 10.0, 0.0}}, 20, 1), "undersampled", InputError);
    CHECK_THROWS_AS(synth_modal({}, 20, 1), InputError);
  }
}

TEST_CASE("numerical model") {
  const CopulaFamily frank{CopulaKind::Frank, 10.0};
  SUBCASE("piecewise activity") {
    NumericalModelOptions o;
    o.noise_scale = 0.0;
    const auto m = synth_numerical_model(frank, o, 1);
    CHECK(m.sources.length() == 1000);
    CHECK(m.baseline.samples(0, 400) == 0.0);
    CHECK(m.baseline.samples(1, 400) == 0.0);
    CHECK(m.baseline.samples(0, 0) == doctest::Approx(1.0));
    CHECK(m.baseline.samples(1, 0) == 0.0);
    const double t = 7.0;
    CHECK(m.baseline.samples(0, 700) == doctest::Approx(std::exp(-0.01 * t) * std::cos(8 * t)));
    CHECK(m.baseline.samples(1, 700) == doctest::Approx(0.6 * std::exp(-0.03 * t) * std::cos(17 * t)));
    CHECK((m.mixture.samples - m.baseline.samples.colwise().sum()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constant decay reading") {
    NumericalModelOptions o;
    o.noise_scale = 0.0;
    o.decay = DecayReading::Constant;
    const auto m = synth_numerical_model(frank, o, 1);
    CHECK(m.baseline.samples(0, 0) == doctest::Approx(std::exp(-0.01)));
    CHECK(m.baseline.samples(0, 700) == doctest::Approx(std::exp(-0.01) * std::cos(56.0)));
  }
  SUBCASE("noise is centred copula noise") {
    NumericalModelOptions o;
    o.noise_scale = 0.1;
    const auto m = synth_numerical_model(frank, o, 4);
    const auto w = sample_copula(frank, 1000, 4);
    for (int k = 0; k < 1000; k += 37) {
      CHECK((m.sources.samples(0, k) - m.baseline.samples(0, k)) / 0.1 + 0.5 == doctest::Approx(w.u[k]));
      CHECK((m.sources.samples(1, k) - m.baseline.samples(1, k)) / 0.1 + 0.5 == doctest::Approx(w.v[k]));
    }
    CHECK((m.mixture.samples - m.sources.samples.colwise().sum()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("sampling rate floor") {
    NumericalModelOptions o;
    o.fs = 10.0;
    CHECK_THROWS_AS(synth_numerical_model(frank, o, 1), InputError);
  }
}
