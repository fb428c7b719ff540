#include "ougauss/semigroup.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "ougauss/covariance.hpp"

namespace ougauss {

namespace {

// iterate tensor product of one-dimensional rules
template <typename F>
void tensor_loop(int n, int order, const QuadRule& rule, F&& body) {
  std::vector<int> idx(n, 0);
  Vec z(n);
  double logw = 0.0;
  (void)logw;
  while (true) {
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      z[d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    body(z, w);
    int d = 0;
    while (d < n && ++idx[d] == order) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
}

}  // namespace

double apply_semigroup(const OUModel& model, double t, const TestFunction& f, const Vec& x,
                       const QuadSettings& quad) {
  if (!(t > 0.0)) fail(ErrorCode::QuadratureBudgetExceeded, "apply_semigroup needs t > 0");
  const int n = model.n;
  const double budget = std::pow(static_cast<double>(quad.gh_order), n);
  if (budget > 2e6) fail(ErrorCode::QuadratureBudgetExceeded, "tensor grid too large");

  CovAtTime cov = covariance_qt(model, t);
  Eigen::LLT<Mat> llt(cov.Qt);
  Mat Sfac = llt.matrixL();
  Vec mean = cov.expB * x;

  const QuadRule& rule = gauss_hermite_prob(quad.gh_order);
  double total = 0.0;
  tensor_loop(n, quad.gh_order, rule, [&](const Vec& z, double w) {
    total += w * f(mean - Sfac * z);
  });
  return total;
}

Polynomial semigroup_poly(const OUModel& model, double t, const Polynomial& f) {
  // H_t f(x) = E_y f(e^{tB}x - y): substitute z = [x; y] and average the y
  // part against N(0, Q_t).
  const int n = model.n;
  CovAtTime cov = covariance_qt(model, t);
  Mat A(n, 2 * n);
  A.leftCols(n) = cov.expB;
  A.rightCols(n) = -Mat::Identity(n, n);
  Polynomial joint = f.substitute_affine(A, Vec::Zero(n));  // in (x, y)

  Polynomial out(n);
  for (const auto& [k, c] : joint.coeffs()) {
    std::vector<int> kx(k.begin(), k.begin() + n);
    std::vector<int> ky(k.begin() + n, k.end());
    double m = gaussian_moment(cov.Qt, ky);
    if (m != 0.0) out.add_term(kx, c * m);
  }
  return out;
}

Polynomial generator_poly(const OUModel& model, const Polynomial& f) {
  const int n = model.n;
  Polynomial out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (model.Q(i, j) == 0.0) continue;
      out = out + f.derivative(i).derivative(j) * (0.5 * model.Q(i, j));
    }
  }
  // <Bx, grad f> = sum_i (sum_j B_ij x_j) d_i f
  for (int i = 0; i < n; ++i) {
    Polynomial di = f.derivative(i);
    if (di.empty()) continue;
    for (int j = 0; j < n; ++j) {
      if (model.B(i, j) == 0.0) continue;
      std::vector<int> xj(n, 0);
      xj[j] = 1;
      out = out + di * Polynomial::monomial(xj, model.B(i, j));
    }
  }
  return out;
}

double generator_apply(const OUModel& model, const TestFunction& f, const Vec& x) {
  if (f.kind == TestFunction::Kind::Polynomial)
    return generator_poly(model, f.poly).eval(x);

  const int n = model.n;
  const double h = 1e-5 * (1.0 + x.norm());
  double lap = 0.0;
  Vec grad(n);
  double f0 = f(x);
  Mat hess(n, n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (f(xp) - f(xm)) / (2.0 * h);
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h; xpp[j] += h;
      xpm[i] += h; xpm[j] -= h;
      xmp[i] -= h; xmp[j] += h;
      xmm[i] -= h; xmm[j] -= h;
      hess(i, j) = hess(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lap += model.Q(i, j) * hess(i, j);
  return 0.5 * lap + (model.B * x).dot(grad);
}

double mean_under_gamma_inf(const OUModel& model, const TestFunction& f,
                            const QuadSettings& quad) {
  if (f.kind == TestFunction::Kind::Polynomial)
    return f.poly.gaussian_mean(Vec::Zero(model.n), model.Qinf);
  const QuadRule& rule = gauss_hermite_prob(quad.gh_order);
  double total = 0.0;
  tensor_loop(model.n, quad.gh_order, rule, [&](const Vec& z, double w) {
    total += w * f(model.Qinf_sqrt * z);
  });
  return total;
}

TestFunction project_p0perp(const OUModel& model, const TestFunction& f,
                            const QuadSettings& quad) {
  double mean = mean_under_gamma_inf(model, f, quad);
  if (f.kind == TestFunction::Kind::Polynomial) {
    Polynomial p = f.poly - Polynomial::constant(model.n, mean);
    return TestFunction::from_poly(std::move(p));
  }
  auto base = f.call;
  return TestFunction::from_callable(f.n, [base, mean](const Vec& x) { return base(x) - mean; });
}

EigenfunctionSpec make_eigenfunction(const OUModel& model, const Vec& v, double lambda_b) {
  double resid = (model.B.transpose() * v - lambda_b * v).norm();
  if (resid > 1e-10 * v.norm())
    fail(ErrorCode::ComplexEigenvalueUnsupported,
         "v is not a real eigenvector of B^T (residual " + std::to_string(resid) + ")");
  if (!(lambda_b < 0.0))
    fail(ErrorCode::NotHurwitz, "eigenvalue must be negative");
  return EigenfunctionSpec{v, lambda_b};
}

std::vector<EigenfunctionSpec> real_eigenfunctions(const OUModel& model, bool* complex_found) {
  Eigen::EigenSolver<Mat> es(model.B.transpose());
  std::vector<EigenfunctionSpec> out;
  bool complex_seen = false;
  for (int i = 0; i < model.n; ++i) {
    if (std::abs(es.eigenvalues()[i].imag()) > 1e-12 * std::abs(es.eigenvalues()[i].real())) {
      complex_seen = true;
      continue;
    }
    Vec v = es.eigenvectors().col(i).real();
    double nrm = v.norm();
    if (nrm == 0.0) continue;
    v /= nrm;
    double lambda = es.eigenvalues()[i].real();
    if ((model.B.transpose() * v - lambda * v).norm() > 1e-9) continue;  // defective/complex leak
    out.push_back(EigenfunctionSpec{v, lambda});
  }
  if (complex_found) *complex_found = complex_seen;
  return out;
}

double riesz_potential_on_eigenfunction(const OUModel& model, const EigenfunctionSpec& spec,
                                        double a, const Vec& x, const QuadSettings& quad) {
  if (!(a > 0.0)) fail(ErrorCode::QuadratureBudgetExceeded, "a must be positive");
  make_eigenfunction(model, spec.v, spec.lambda_b);  // revalidates; throws on complex/invalid

  const double fx = spec.v.dot(x);
  const double lgamma_a = std::lgamma(a);

  // integrand in tau = log t: e^{a tau} H_t f_v(x), with
  // H_t f_v(x) = <e^{tB^T} v, x> evaluated by the exact polynomial route.
  Polynomial fv = Polynomial::linear(spec.v);
  auto integrand = [&](double tau) {
    double t = std::exp(tau);
    double ht = semigroup_poly(model, t, fv).eval(x);
    return LogValue::from_double(ht).scaled(a * tau - lgamma_a);
  };

  LogIntegral res = integrate_log(integrand, quad.tau_lo, quad.tau_hi, quad.rel_tol, 8,
                                  quad.max_panels);
  if (!res.converged)
    fail(ErrorCode::QuadratureBudgetExceeded, "potential quadrature did not converge");

  // Head of the integral below tau_lo: H_t f - f = O(t) there, so
  // int_0^{t0} t^{a-1} H_t f dt = f(x) t0^a / a + O(t0^{a+1}).
  double t0 = std::exp(quad.tau_lo);
  double head = fx * std::exp(a * quad.tau_lo - lgamma_a) / a;
  (void)t0;
  return res.value.to_double() + head;
}

}  // namespace ougauss
