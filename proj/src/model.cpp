#include "ougauss/model.hpp"

#include <Eigen/Eigenvalues>
#include <complex>

namespace ougauss {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::LyapunovSolveFailed: return "LyapunovSolveFailed";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::EmptyMultiindex: return "EmptyMultiindex";
    case ErrorCode::ComplexEigenvalueUnsupported: return "ComplexEigenvalueUnsupported";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::NearDiagonal: return "NearDiagonal";
    case ErrorCode::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case ErrorCode::SupportOverlap: return "SupportOverlap";
    case ErrorCode::UnknownEstimate: return "UnknownEstimate";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::T0NotFound: return "T0NotFound";
    case ErrorCode::GridBudgetExceeded: return "GridBudgetExceeded";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

Mat solve_lyapunov(const Mat& A, const Mat& W) {
  using CMat = Eigen::MatrixXcd;
  const int n = static_cast<int>(A.rows());

  Eigen::ComplexSchur<Mat> schur(A);
  if (schur.info() != Eigen::Success)
    fail(ErrorCode::LyapunovSolveFailed, "Schur decomposition failed");
  const CMat U = schur.matrixU();
  const CMat T = schur.matrixT();  // upper triangular

  // A X + X A^H = -W  becomes  T Y + Y T^H = C with Y = U^H X U.
  CMat C = -U.adjoint() * W.cast<std::complex<double>>() * U;
  CMat Y = CMat::Zero(n, n);
  for (int j = n - 1; j >= 0; --j) {
    for (int i = n - 1; i >= 0; --i) {
      std::complex<double> rhs = C(i, j);
      for (int k = i + 1; k < n; ++k) rhs -= T(i, k) * Y(k, j);
      for (int k = j + 1; k < n; ++k) rhs -= Y(i, k) * std::conj(T(j, k));
      std::complex<double> denom = T(i, i) + std::conj(T(j, j));
      if (std::abs(denom) < 1e-14 * (std::abs(T(i, i)) + std::abs(T(j, j)) + 1.0))
        fail(ErrorCode::LyapunovSolveFailed, "near-singular eigenvalue pairing");
      Y(i, j) = rhs / denom;
    }
  }
  Mat X = (U * Y * U.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

OUModel build_model(const Mat& Q, const Mat& B, const Tolerances& tol) {
  if (Q.rows() != Q.cols() || B.rows() != B.cols() || Q.rows() != B.rows() || Q.rows() < 1)
    fail(ErrorCode::NotSymmetric, "Q and B must be square matrices of equal size");
  if (!Q.allFinite() || !B.allFinite())
    fail(ErrorCode::NotSymmetric, "non-finite entries");

  const int n = static_cast<int>(Q.rows());
  const double qnorm = Q.norm();
  if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, qnorm))
    fail(ErrorCode::NotSymmetric, "Q is not symmetric");

  Eigen::SelfAdjointEigenSolver<Mat> qe(Q);
  if (qe.eigenvalues().minCoeff() <= tol.pd_rel * qnorm)
    fail(ErrorCode::NotPositiveDefinite, "Q has a non-positive (or borderline) eigenvalue");

  Eigen::EigenSolver<Mat> be(B);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) abscissa = std::max(abscissa, be.eigenvalues()[i].real());
  if (!(abscissa < -tol.hurwitz))
    fail(ErrorCode::NotHurwitz, "B has an eigenvalue with real part >= -tol");

  OUModel m;
  m.n = n;
  m.Q = 0.5 * (Q + Q.transpose());
  m.B = B;
  m.tol = tol;
  m.spectral_abscissa = abscissa;
  m.trace_B = B.trace();

  m.Qinf = solve_lyapunov(B, m.Q);
  double resid = (B * m.Qinf + m.Qinf * B.transpose() + m.Q).norm() / qnorm;
  if (!(resid <= tol.lyapunov_rel))
    fail(ErrorCode::LyapunovSolveFailed, "stationarity residual " + std::to_string(resid));

  Eigen::LLT<Mat> llt(m.Qinf);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "Qinf is not positive definite");
  m.Qinf_sqrt = llt.matrixL();
  m.Qinf_inv = llt.solve(Mat::Identity(n, n));
  m.Qinf_logdet = 2.0 * m.Qinf_sqrt.diagonal().array().log().sum();

  Eigen::LLT<Mat> lltq(m.Q);
  if (lltq.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "Q is not positive definite");
  m.Q_sqrt = lltq.matrixL();

  double sqrt_resid = (m.Qinf_sqrt * m.Qinf_sqrt.transpose() - m.Qinf).norm() / m.Qinf.norm();
  if (sqrt_resid > 1e-12)
    fail(ErrorCode::LyapunovSolveFailed, "Qinf factorization residual too large");
  return m;
}

double lyapunov_residual(const OUModel& m) {
  return (m.B * m.Qinf + m.Qinf * m.B.transpose() + m.Q).norm() / m.Q.norm();
}

}  // namespace ougauss
