#include "ougauss/geometry.hpp"

#include <cmath>

namespace ougauss {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double quad_form_r(const OUModel& model, const Vec& x) {
  return 0.5 * x.dot(model.Qinf_inv * x);
}

double norm_q(const OUModel& model, const Vec& x) {
  // |Qinf^{-1/2} x| via the Cholesky factor: Qinf = L L^T, so |L^{-1} x|.
  Vec y = model.Qinf_sqrt.triangularView<Eigen::Lower>().solve(x);
  return y.norm();
}

double log_gaussian_density(const OUModel& model, double t, const Vec& x) {
  if (std::isinf(t)) {
    return -0.5 * model.n * std::log(2.0 * kPi) - 0.5 * model.Qinf_logdet -
           quad_form_r(model, x);
  }
  CovAtTime c = covariance_qt(model, t);
  return -0.5 * model.n * std::log(2.0 * kPi) - 0.5 * c.Qt_logdet -
         0.5 * x.dot(c.Qt_inv * x);
}

double flow_r_derivative(const OUModel& model, const Vec& dsx) {
  Vec w = model.Qinf_inv * dsx;
  return 0.5 * (model.Q_sqrt.transpose() * w).squaredNorm();
}

double polar_volume_element(const OUModel& model, const PolarPoint& p) {
  Vec w = model.Qinf_inv * p.xtilde;
  double num = (model.Q_sqrt.transpose() * w).squaredNorm();
  return std::exp(-p.s * model.trace_B) * num / (2.0 * w.norm());
}

PolarPoint to_polar(const OUModel& model, const Vec& x, double beta) {
  if (x.norm() == 0.0) fail(ErrorCode::ZeroVector, "x = 0 has no polar representation");
  if (!(beta > 0.0)) fail(ErrorCode::ZeroVector, "beta must be positive");

  // g(s) = R(D_{-s} x) is strictly decreasing with limits +inf and 0.
  auto g = [&](double s) { return quad_form_r(model, flow_dt(model, -s) * x); };

  double lo = 0.0, hi = 0.0;
  double g0 = g(0.0);
  if (g0 > beta) {
    // root to the right
    double step = 1.0;
    hi = step;
    int k = 0;
    while (g(hi) > beta) {
      lo = hi;
      step *= 2.0;
      hi = step;
      if (++k > 60 || hi > 100.0)
        fail(ErrorCode::RootBracketFailure,
             "bracket [" + std::to_string(lo) + "," + std::to_string(hi) + "] failed");
    }
  } else if (g0 < beta) {
    double step = 1.0;
    lo = -step;
    int k = 0;
    while (g(lo) < beta) {
      hi = lo;
      step *= 2.0;
      lo = -step;
      if (++k > 60 || lo < -100.0)
        fail(ErrorCode::RootBracketFailure,
             "bracket [" + std::to_string(lo) + "," + std::to_string(hi) + "] failed");
    }
  }

  double s = 0.0;
  if (g0 != beta) {
    // bisection to a loose tolerance, then secant polish
    double flo = g(lo) - beta, fhi = g(hi) - beta;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
      double mid = 0.5 * (lo + hi);
      double fm = g(mid) - beta;
      if ((flo > 0) == (fm > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
    }
    (void)fhi;
    s = 0.5 * (lo + hi);
    double tol = 1e-12 * std::max(1.0, beta);
    double s_prev = lo, f_prev = g(lo) - beta;
    double f = g(s) - beta;
    for (int iter = 0; iter < 50 && std::abs(f) > tol; ++iter) {
      double denom = f - f_prev;
      if (denom == 0.0) break;
      double s_next = s - f * (s - s_prev) / denom;
      s_prev = s;
      f_prev = f;
      s = s_next;
      f = g(s) - beta;
    }
    if (std::abs(f) > 1e-9 * std::max(1.0, beta))
      fail(ErrorCode::RootBracketFailure, "root polish stalled, |residual| = " + std::to_string(std::abs(f)));
  }

  PolarPoint p;
  p.s = s;
  p.xtilde = flow_dt(model, -s) * x;
  p.beta = beta;
  p.weight = polar_volume_element(model, p);
  return p;
}

Vec from_polar(const OUModel& model, const PolarPoint& p) {
  return flow_dt(model, p.s) * p.xtilde;
}

Region classify_region(const OUModel& model, const Vec& x, const Vec& u, double A) {
  (void)model;
  return (x - u).norm() <= A / (1.0 + x.norm()) ? Region::Local : Region::Global;
}

}  // namespace ougauss
