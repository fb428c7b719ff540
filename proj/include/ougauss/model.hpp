#pragma once

#include <Eigen/Dense>

#include "ougauss/errors.hpp"

namespace ougauss {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Tolerances {
  double pd_rel = 1e-10;        // min eigenvalue of Q must exceed pd_rel*||Q||
  double hurwitz = 1e-8;        // eigenvalues of B must have real part < -hurwitz
  double lyapunov_rel = 1e-10;  // ||B X + X B^T + Q|| <= lyapunov_rel * ||Q||
};

// Validated (Q,B) pair together with the stationary covariance and its
// factorizations. Immutable after construction; safe to share across threads.
struct OUModel {
  int n = 0;
  Mat Q;           // diffusion covariance, symmetric positive definite
  Mat B;           // drift, all eigenvalues in the open left half plane
  Mat Qinf;        // solves B Qinf + Qinf B^T = -Q
  Mat Qinf_inv;
  double Qinf_logdet = 0.0;
  Mat Qinf_sqrt;   // lower Cholesky factor, Qinf_sqrt * Qinf_sqrt^T = Qinf
  Mat Q_sqrt;      // lower Cholesky factor of Q
  Tolerances tol;

  double spectral_abscissa = 0.0;  // max Re(eig(B)), negative for accepted models
  double trace_B = 0.0;
};

// Dense solve of A X + X A^T = -W for symmetric W via complex Schur reduction
// (Bartels-Stewart). Requires that no two eigenvalues of A sum to zero, which
// holds whenever A is Hurwitz.
Mat solve_lyapunov(const Mat& A, const Mat& W);

OUModel build_model(const Mat& Q, const Mat& B, const Tolerances& tol = Tolerances());

// ||B Qinf + Qinf B^T + Q|| / ||Q||, the stationarity residual.
double lyapunov_residual(const OUModel& m);

}  // namespace ougauss
