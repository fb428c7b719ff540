#include <cmath>

#include "ougauss/geometry.hpp"
#include "support.hpp"

using namespace ougauss;
using namespace ougauss::testing;

TEST_CASE("quadratic form values") {
  OUModel m = scalar_standard();
  CHECK(quad_form_r(m, vec1(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quad_form_r(m, vec1(0.0)) == 0.0);
  OUModel m2 = isotropic2();
  CHECK(quad_form_r(m2, vec2(1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
  // R(x) = |x|_Q^2 / 2
  for (int k = 0; k < 20; ++k) {
    OUModel r = random_model(1 + k % 3, 2000 + k);
    Rng rng(k);
    Vec x = r.Qinf_sqrt * rng.normal_vec(r.n);
    double nq = norm_q(r, x);
    CHECK(quad_form_r(r, x) == doctest::Approx(0.5 * nq * nq).epsilon(1e-12));
  }
}

TEST_CASE("log gaussian density: scalar values and normalization") {
  OUModel m = scalar_standard();
  // variance 1/2 at t = infinity
  double inf0 = log_gaussian_density(m, std::numeric_limits<double>::infinity(), vec1(0.0));
  CHECK(inf0 == doctest::Approx(-0.5 * std::log(2.0 * M_PI * 0.5)).epsilon(1e-14));
  // finite-t value via Q_1
  double q1 = (1.0 - std::exp(-2.0)) / 2.0;
  double f0 = log_gaussian_density(m, 1.0, vec1(0.0));
  CHECK(f0 == doctest::Approx(-0.5 * std::log(2.0 * M_PI * q1)).epsilon(1e-13));
  // density integrates to 1 (trapezoid over [-8, 8])
  double mass = 0.0;
  int N = 4000;
  for (int i = 0; i < N; ++i) {
    double x = -8.0 + 16.0 * (i + 0.5) / N;
    mass += std::exp(log_gaussian_density(m, 1.0, vec1(x)))* (16.0 / N);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  // centered maximum
  CHECK(log_gaussian_density(m, INFINITY, vec1(0.0)) >
        log_gaussian_density(m, INFINITY, vec1(0.3)));
}

TEST_CASE("polar coordinates: scalar closed form") {
  OUModel m = scalar_standard();
  PolarPoint p = to_polar(m, vec1(2.0), 1.0);
  CHECK(p.s == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(p.xtilde[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(polar_volume_element(m, p) ==
        doctest::Approx(std::exp(p.s) * 1.0).epsilon(1e-10));  // e^{-s tr B} * 1

  PolarPoint p0{0.0, vec1(1.0), 1.0, 0.0};
  CHECK(polar_volume_element(m, p0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("to_polar: points already on the level set return s = 0") {
  for (int k = 0; k < 10; ++k) {
    OUModel m = random_model(2, 3000 + k);
    Rng rng(k);
    Vec x = m.Qinf_sqrt * rng.normal_vec(2);
    double beta = quad_form_r(m, x);
    PolarPoint p = to_polar(m, x, beta);
    CHECK(std::abs(p.s) <= 1e-9);
    CHECK((p.xtilde - x).norm() <= 1e-8 * x.norm());
  }
}

TEST_CASE("polar round trip on random points") {
  for (int k = 0; k < 100; ++k) {
    OUModel m = random_model(1 + k % 4, 4000 + k);
    Rng rng(k + 17);
    Vec x = m.Qinf_sqrt * rng.normal_vec(m.n);
    if (x.norm() < 1e-6) continue;
    double beta = 0.25 + 2.0 * rng.uniform();
    PolarPoint p = to_polar(m, x, beta);
    CHECK(quad_form_r(m, p.xtilde) == doctest::Approx(beta).epsilon(1e-10));
    Vec back = from_polar(m, p);
    CHECK((back - x).norm() <= 1e-9 * x.norm());
  }
}

TEST_CASE("to_polar rejects the origin") {
  OUModel m = scalar_standard();
  try {
    to_polar(m, vec1(0.0), 1.0);
    FAIL("expected ZeroVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
}

TEST_CASE("polar volume element scales like e^{-s tr B} in s") {
  OUModel m = random_model(2, 5100);
  Vec xt = to_polar(m, vec2(0.7, -0.4), 1.0).xtilde;
  PolarPoint p1{0.3, xt, 1.0, 0.0}, p2{1.1, xt, 1.0, 0.0};
  double ratio = polar_volume_element(m, p2) / polar_volume_element(m, p1);
  CHECK(ratio == doctest::Approx(std::exp(-(1.1 - 0.3) * m.trace_B)).epsilon(1e-12));
}

TEST_CASE("Cartesian and polar integration agree for a rapidly decaying function") {
  // f(x) = exp(-2 R(x)) on the isotropic 2-d model, against a fine grid
  OUModel m = isotropic2();
  auto f = [&](const Vec& x) { return std::exp(-2.0 * quad_form_r(m, x)); };

  double cart = 0.0;
  const int N = 600;
  const double L = 5.0, h = 2.0 * L / N;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Vec x = vec2(-L + (i + 0.5) * h, -L + (j + 0.5) * h);
      cart += f(x) * h * h;
    }

  // polar: beta = 1; theta parametrizes E_beta, s flows across levels
  double polar = 0.0;
  const int NT = 400, NS = 400;
  const double beta = 1.0, s_lo = -6.0, s_hi = 2.5;
  for (int i = 0; i < NT; ++i) {
    double th = 2.0 * M_PI * (i + 0.5) / NT;
    Vec omega = vec2(std::cos(th), std::sin(th));
    Vec xt = std::sqrt(2.0 * beta) * (m.Qinf_sqrt * omega);
    Vec domega = vec2(-std::sin(th), std::cos(th));
    double darc = (std::sqrt(2.0 * beta) * (m.Qinf_sqrt * domega)).norm() * 2.0 * M_PI / NT;
    for (int j = 0; j < NS; ++j) {
      double s = s_lo + (s_hi - s_lo) * (j + 0.5) / NS;
      Vec x = flow_dt(m, s) * xt;
      PolarPoint p{s, xt, beta, 0.0};
      polar += f(x) * polar_volume_element(m, p) * (s_hi - s_lo) / NS * darc;
    }
  }
  CHECK(polar == doctest::Approx(cart).epsilon(1e-4));
}

TEST_CASE("region classification") {
  OUModel m = isotropic2();
  CHECK(classify_region(m, vec2(1.0, 1.0), vec2(1.0, 1.0), 0.7) == Region::Local);
  CHECK(classify_region(m, vec2(0.0, 0.0), vec2(2.4, 0.0), 1.2) == Region::Global);
  CHECK(classify_region(m, vec2(3.0, 0.0), vec2(3.0, 0.2), 1.0) == Region::Local);
  // boundary counts as local
  OUModel s = scalar_standard();
  CHECK(classify_region(s, vec1(0.0), vec1(1.0), 1.0) == Region::Local);
}

TEST_CASE("flow derivative of R matches finite differences") {
  for (int k = 0; k < 20; ++k) {
    OUModel m = random_model(1 + k % 3, 6000 + k);
    Rng rng(k + 3);
    Vec x = m.Qinf_sqrt * rng.normal_vec(m.n);
    if (x.norm() < 1e-3) continue;
    double s = rng.uniform(-1.0, 1.0);
    double h = 1e-6;
    double fd = (quad_form_r(m, flow_dt(m, s + h) * x) -
                 quad_form_r(m, flow_dt(m, s - h) * x)) / (2.0 * h);
    double exact = flow_r_derivative(m, flow_dt(m, s) * x);
    CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
  }
}
