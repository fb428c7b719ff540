#pragma once

#include "ougauss/geometry.hpp"
#include "ougauss/logvalue.hpp"

namespace ougauss {

// Mehler kernel of H_t with respect to gamma_inf, in sign/log form:
// K_t(x,u) = (det Qinf / det Q_t)^{1/2} e^{R(x)}
//            exp[-1/2 <(Q_t^{-1}-Qinf^{-1})(u - D_t x), u - D_t x>].
// Evaluated through w = D_{-t}u - x and S = Qinf^{-1} - Delta(t), which is
// the same bilinear form written so that nothing grows with t.
LogValue log_mehler(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u);
LogValue log_mehler(const OUModel& model, double t, const Vec& x, const Vec& u);

// P_j(t,x,u) = <Qinf^{-1} x, e_j> + <Q_t^{-1} e^{tB} e_j, u - D_t x>,
// the log-derivative of K_t in x_j. Returned for all j at once.
Vec p_vector(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u);
Vec p_vector(const OUModel& model, double t, const Vec& x, const Vec& u);

// Delta_ij(t) = d P_j / d x_i = -<e_j, e^{tB^T} Q_t^{-1} e^{tB} e_i>.
Mat delta_matrix(const OUModel& model, const CovAtTime& cov);
Mat delta_matrix(const OUModel& model, double t);

// K, P and Delta share most of their work; quadratures grab them together.
struct MehlerParts {
  LogValue logK;
  Vec P;
  const Mat* delta = nullptr;  // borrowed from the CovAtTime
};
MehlerParts mehler_parts(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u);

// Split of P_j into its two summands: a_j = <Qinf^{-1}x, e_j> (t-independent)
// and b_j(t) = P_j - a_j. The counterexample's dominant-term audit needs them
// separately.
struct PSplit {
  Vec a;
  Vec b;
};
PSplit p_split(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u);

}  // namespace ougauss
