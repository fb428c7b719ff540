#include "ougauss/mehler.hpp"

namespace ougauss {

LogValue log_mehler(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u) {
  Vec w = cov.Dminus * u - x;
  double form = w.dot(cov.S * w);
  double lm = 0.5 * (model.Qinf_logdet - cov.Qt_logdet) + quad_form_r(model, x) - 0.5 * form;
  return LogValue(1, lm);
}

LogValue log_mehler(const OUModel& model, double t, const Vec& x, const Vec& u) {
  return log_mehler(model, covariance_qt(model, t), x, u);
}

Vec p_vector(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u) {
  // P = -Delta (D_{-t}u - x) + Qinf^{-1} D_{-t} u; identical to the defining
  // expression but free of e^{-tB^T} factors.
  Vec du = cov.Dminus * u;
  return -(cov.delta * (du - x)) + model.Qinf_inv * du;
}

Vec p_vector(const OUModel& model, double t, const Vec& x, const Vec& u) {
  return p_vector(model, covariance_qt(model, t), x, u);
}

Mat delta_matrix(const OUModel& model, const CovAtTime& cov) {
  (void)model;
  return cov.delta;
}

Mat delta_matrix(const OUModel& model, double t) {
  return covariance_qt(model, t).delta;
}

MehlerParts mehler_parts(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u) {
  MehlerParts parts;
  Vec du = cov.Dminus * u;
  Vec w = du - x;
  double form = w.dot(cov.S * w);
  parts.logK = LogValue(
      1, 0.5 * (model.Qinf_logdet - cov.Qt_logdet) + quad_form_r(model, x) - 0.5 * form);
  parts.P = -(cov.delta * w) + model.Qinf_inv * du;
  parts.delta = &cov.delta;
  return parts;
}

PSplit p_split(const OUModel& model, const CovAtTime& cov, const Vec& x, const Vec& u) {
  PSplit s;
  s.a = model.Qinf_inv * x;
  s.b = p_vector(model, cov, x, u) - s.a;
  return s;
}

}  // namespace ougauss
