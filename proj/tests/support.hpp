#pragma once

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "ougauss/model.hpp"
#include "ougauss/quadrature.hpp"

namespace ougauss::testing {

// scalar standard model: Q = 1, B = -1, Qinf = 1/2
inline OUModel scalar_standard() {
  Mat Q(1, 1), B(1, 1);
  Q << 1.0;
  B << -1.0;
  return build_model(Q, B);
}

inline OUModel isotropic2() {  // Q = I2, B = -I2
  return build_model(Mat::Identity(2, 2), -Mat::Identity(2, 2));
}

// Random SPD Q and Hurwitz B with spectral abscissa <= -0.3. The spread of
// the drift's real parts is capped: several flow identities are conditioned
// like e^{2 t spread}, and the checks run out to t = 5.
inline OUModel random_model(int n, std::uint64_t seed) {
  Rng rng(seed);
  for (int tries = 0; tries < 50; ++tries) {
    Mat A(n, n), M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        A(i, j) = rng.normal();
        M(i, j) = 0.7 * rng.normal();
      }
    Mat Q = A * A.transpose() / n + 0.3 * Mat::Identity(n, n);
    Eigen::EigenSolver<Mat> es(M);
    double lo = es.eigenvalues().real().minCoeff();
    double hi = es.eigenvalues().real().maxCoeff();
    double scale = hi - lo > 0.8 ? 0.8 / (hi - lo) : 1.0;
    Mat B = scale * M - (scale * hi + 0.3 + 0.7 * rng.uniform()) * Mat::Identity(n, n);
    try {
      return build_model(Q, B);
    } catch (const Error&) {
      continue;
    }
  }
  throw std::runtime_error("random_model: generation failed");
}

inline Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}
inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace ougauss::testing
