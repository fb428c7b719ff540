#pragma once

#include <optional>

#include "ougauss/polynomial.hpp"
#include "ougauss/quadrature.hpp"

namespace ougauss {

struct QuadSettings {
  int gh_order = 20;        // Gauss-Hermite order per axis
  double rel_tol = 1e-9;    // time-quadrature tolerance
  double tau_lo = -30.0;    // window in tau = log t for the Riesz potential
  double tau_hi = 10.0;
  int max_panels = 1 << 12;
};

// H_t f(x) = int f(e^{tB} x - y) dgamma_t(y), Kolmogorov's formula, by tensor
// Gauss-Hermite quadrature in gamma_t = N(0, Q_t) coordinates.
double apply_semigroup(const OUModel& model, double t, const TestFunction& f, const Vec& x,
                       const QuadSettings& quad = QuadSettings());

// Exact route for polynomial f: H_t f as a polynomial in x (moment calculus).
Polynomial semigroup_poly(const OUModel& model, double t, const Polynomial& f);

// L f = 1/2 tr(Q grad^2 f) + <Bx, grad f>. Polynomials exactly; callables by
// central differences.
double generator_apply(const OUModel& model, const TestFunction& f, const Vec& x);
Polynomial generator_poly(const OUModel& model, const Polynomial& f);

double mean_under_gamma_inf(const OUModel& model, const TestFunction& f,
                            const QuadSettings& quad = QuadSettings());

// f - its gamma_inf mean; idempotent.
TestFunction project_p0perp(const OUModel& model, const TestFunction& f,
                            const QuadSettings& quad = QuadSettings());

// Linear eigenfunction f_v(x) = <v, x> of L with B^T v = lambda v, lambda < 0.
struct EigenfunctionSpec {
  Vec v;
  double lambda_b = 0.0;  // eigenvalue of B^T (negative)
};

EigenfunctionSpec make_eigenfunction(const OUModel& model, const Vec& v, double lambda_b);

// All real-eigenvector specs of B^T (unit vectors); complex pairs reported
// via the `complex_found` flag.
std::vector<EigenfunctionSpec> real_eigenfunctions(const OUModel& model,
                                                   bool* complex_found = nullptr);

// (-L)^{-a} on f_v by the time integral (1/Gamma(a)) int t^{a-1} H_t f_v dt,
// t = e^tau substitution, plus the analytic head below tau_lo. Equals
// (-lambda)^{-a} f_v(x) for real lambda.
double riesz_potential_on_eigenfunction(const OUModel& model, const EigenfunctionSpec& spec,
                                        double a, const Vec& x,
                                        const QuadSettings& quad = QuadSettings());

}  // namespace ougauss
