#include "ougauss/covariance.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cstring>

namespace ougauss {

namespace {

// Scaling-and-squaring Pade exponential (Eigen). Inputs are kept below
// overflow by the callers' |t| guards and by the complement path for Q_t.
Mat expm(const Mat& A) { return A.exp(); }

// ||tB||_inf above which the block exponential is avoided. Its antistable
// block grows like e^{+||tB||}, so roundoff in the E12 block is amplified by
// about e^{||tB||} epsilon; beyond this cap the complement identity is the
// accurate route (Q_t is then a bounded perturbation of Qinf).
constexpr double kVanLoanNormCap = 4.0;

}  // namespace

CovAtTime covariance_qt(const OUModel& model, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    fail(ErrorCode::QuadratureDivergence, "covariance_qt requires finite t > 0");

  const int n = model.n;
  CovAtTime c;
  c.t = t;
  c.expB = expm(t * model.B);

  const double tb_norm = (t * model.B).cwiseAbs().rowwise().sum().maxCoeff();
  if (tb_norm <= kVanLoanNormCap) {
    Mat block = Mat::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = model.B;
    block.topRightCorner(n, n) = model.Q;
    block.bottomRightCorner(n, n) = -model.B.transpose();
    Mat E = expm(t * block);
    if (!E.allFinite())
      fail(ErrorCode::QuadratureDivergence, "block exponential overflow at t=" + std::to_string(t));
    // E = [[e^{tB}, G], [0, e^{-tB^T}]] with G e^{tB^T} = Q_t
    c.Qt = E.topRightCorner(n, n) * E.topLeftCorner(n, n).transpose();
  } else {
    // Q_t = Qinf - e^{tB} Qinf e^{tB^T}; the subtracted term decays, so no
    // cancellation once t is of this size.
    c.Qt = model.Qinf - c.expB * model.Qinf * c.expB.transpose();
  }
  c.Qt = 0.5 * (c.Qt + c.Qt.transpose());

  Eigen::LLT<Mat> llt(c.Qt);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::QuadratureDivergence, "Q_t not positive definite at t=" + std::to_string(t));
  c.Qt_inv = llt.solve(Mat::Identity(n, n));
  c.Qt_inv = 0.5 * (c.Qt_inv + c.Qt_inv.transpose());
  c.Qt_logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();

  c.Dminus = model.Qinf * c.expB.transpose() * model.Qinf_inv;
  c.delta = -c.expB.transpose() * c.Qt_inv * c.expB;
  c.delta = 0.5 * (c.delta + c.delta.transpose());
  c.S = model.Qinf_inv - c.delta;

  // Q_t^{-1} - Qinf^{-1} = D_{-t}^T S D_{-t}: a congruence of the positive
  // definite S, so positivity survives in floating point even for large t.
  c.Dt_diff_inv = c.Dminus.transpose() * c.S * c.Dminus;
  c.Dt_diff_inv = 0.5 * (c.Dt_diff_inv + c.Dt_diff_inv.transpose());
  return c;
}

Mat flow_dt(const OUModel& model, double t) {
  if (!std::isfinite(t) || std::abs(t) > 100.0)
    fail(ErrorCode::QuadratureDivergence, "flow_dt: |t| > 100 rejected");
  return model.Qinf * expm(-t * model.B.transpose()) * model.Qinf_inv;
}

Mat flow_dt_via_qt(const OUModel& model, const CovAtTime& cov) {
  (void)model;
  Eigen::LLT<Mat> llt(cov.Dt_diff_inv);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::QuadratureDivergence, "Dt_diff_inv not positive definite");
  Mat rhs = cov.Qt_inv * cov.expB;
  Mat X = llt.solve(rhs);
  X += llt.solve(rhs - cov.Dt_diff_inv * X);  // one refinement step
  return X;
}

Mat flow_dt_via_expansion(const OUModel& model, const CovAtTime& cov) {
  Mat expmBT = expm(-cov.t * model.B.transpose());
  return cov.expB + cov.Qt * expmBT * model.Qinf_inv;
}

}  // namespace ougauss
