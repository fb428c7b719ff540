#pragma once

#include "ougauss/covariance.hpp"

namespace ougauss {

// R(x) = <Qinf^{-1} x, x>/2
double quad_form_r(const OUModel& model, const Vec& x);

// |x|_Q = |Qinf^{-1/2} x|, so R(x) = |x|_Q^2 / 2
double norm_q(const OUModel& model, const Vec& x);

// log density of gamma_t at x with respect to Lebesgue measure.
// t = +infinity selects the invariant measure gamma_inf.
double log_gaussian_density(const OUModel& model, double t, const Vec& x);

struct PolarPoint {
  double s = 0.0;
  Vec xtilde;
  double beta = 0.0;
  double weight = 0.0;  // e^{-s tr B} |Q^{1/2} Qinf^{-1} xt|^2 / (2 |Qinf^{-1} xt|)
};

// x = D_s xtilde with R(xtilde) = beta. Unique because s -> R(D_s y) is
// strictly increasing. x = 0 has no representation (hard error).
PolarPoint to_polar(const OUModel& model, const Vec& x, double beta);
Vec from_polar(const OUModel& model, const PolarPoint& p);

double polar_volume_element(const OUModel& model, const PolarPoint& p);

// d/ds R(D_s x) = |Q^{1/2} Qinf^{-1} D_s x|^2 / 2, the exact flow derivative.
double flow_r_derivative(const OUModel& model, const Vec& dsx);

enum class Region { Local, Global };

// Local iff |x-u| <= A/(1+|x|); the boundary counts as local.
Region classify_region(const OUModel& model, const Vec& x, const Vec& u, double A);

}  // namespace ougauss
