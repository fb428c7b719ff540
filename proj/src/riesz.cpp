#include "ougauss/riesz.hpp"

#include <algorithm>
#include <cmath>

namespace ougauss {

RieszKernel::RieszKernel(const OUModel& model, MultiIndex alpha, RieszKernelConfig cfg)
    : model_(model), alpha_(std::move(alpha)), cfg_(cfg) {
  cfg_.validate();
  const int order = multi_order(alpha_);
  if (order < 1) fail(ErrorCode::EmptyMultiindex, "|alpha| must be >= 1");
  ledger_ = expand_dalpha(alpha_, model.n);
  log_gamma_norm_ = std::lgamma(order / 2.0);
}

LogValue RieszKernel::integrand(double tau, const Vec& x, const Vec& u, CovCache& cache) const {
  // t^{(|alpha|-2)/2} dt = e^{tau |alpha|/2} dtau
  const double t = std::exp(tau);
  const CovAtTime& cov = cache.at(t);
  LogValue v = eval_dalpha_log(model_, ledger_, cov, x, u);
  return v.scaled(0.5 * multi_order(alpha_) * tau - log_gamma_norm_);
}

RieszKernelValue RieszKernel::eval_parts(const Vec& x, const Vec& u, CovCache& cache) const {
  if ((x - u).norm() < cfg_.near_diagonal_guard)
    fail(ErrorCode::NearDiagonal, "|x-u| below the near-diagonal guard");

  // Coarse scan locates the integrand's peak; integration is restricted to
  // the window where the log magnitude stays within window_nats of the peak.
  const double hi_cap = cfg_.tail_cutoff;
  const int nscan = static_cast<int>(std::floor((hi_cap - cfg_.scan_floor) / cfg_.scan_step)) + 1;
  double peak = -std::numeric_limits<double>::infinity();
  int peak_idx = -1;
  std::vector<double> lm(nscan);
  for (int i = 0; i < nscan; ++i) {
    double tau = cfg_.scan_floor + i * cfg_.scan_step;
    LogValue v = integrand(tau, x, u, cache);
    lm[i] = v.sign == 0 ? -std::numeric_limits<double>::infinity() : v.logmag;
    if (lm[i] > peak) {
      peak = lm[i];
      peak_idx = i;
    }
  }

  RieszKernelValue out;
  if (!std::isfinite(peak)) return out;  // integrand is identically ~0

  int ilo = peak_idx, ihi = peak_idx;
  while (ilo > 0 && lm[ilo] > peak - cfg_.window_nats) --ilo;
  while (ihi < nscan - 1 && lm[ihi] > peak - cfg_.window_nats) ++ihi;
  double tau_lo = std::max(cfg_.scan_floor, cfg_.scan_floor + ilo * cfg_.scan_step - 1.0);
  double tau_hi = std::min(hi_cap, cfg_.scan_floor + ihi * cfg_.scan_step + 1.0);

  auto f = [&](double tau) { return integrand(tau, x, u, cache); };
  auto run = [&](double a, double b) -> LogValue {
    if (!(b > a)) return LogValue::zero();
    int panels = std::max(cfg_.min_panels, static_cast<int>(std::ceil(4.0 * (b - a))));
    LogIntegral res = integrate_log(f, a, b, cfg_.rel_tol, panels, cfg_.max_panels);
    if (!res.converged)
      fail(ErrorCode::QuadratureNonconvergence,
           "last two estimates " + std::to_string(res.previous.to_double()) + " and " +
               std::to_string(res.value.to_double()));
    return res.value;
  };

  const double sigma = std::log(cfg_.split_time);
  if (sigma <= tau_lo) {
    out.part_large = run(tau_lo, tau_hi);
  } else if (sigma >= tau_hi) {
    out.part_small = run(tau_lo, tau_hi);
  } else {
    out.part_small = run(tau_lo, sigma);
    out.part_large = run(sigma, tau_hi);
  }
  out.whole = out.part_small + out.part_large;
  return out;
}

LogValue RieszKernel::eval(const Vec& x, const Vec& u, CovCache& cache) const {
  return eval_parts(x, u, cache).whole;
}

LogValue riesz_kernel(const OUModel& model, const MultiIndex& alpha, const Vec& x, const Vec& u,
                      const RieszKernelConfig& cfg) {
  RieszKernel k(model, alpha, cfg);
  CovCache cache(model);
  return k.eval(x, u, cache);
}

RieszKernelValue riesz_kernel_parts(const OUModel& model, const MultiIndex& alpha, const Vec& x,
                                    const Vec& u, const RieszKernelConfig& cfg) {
  RieszKernel k(model, alpha, cfg);
  CovCache cache(model);
  return k.eval_parts(x, u, cache);
}

double eval_cutoff(const CutoffEta& eta, const OUModel& model, const Vec& x, const Vec& u) {
  (void)model;
  double r = (x - u).norm() * (1.0 + x.norm()) / eta.A;
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  double s = r - 1.0;
  double step = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  return 1.0 - step;
}

namespace {

// Polynomial f with L f = -mu f (after projection): mu from the coefficient
// ratio, or nullopt when f is not an eigenfunction.
std::optional<double> eigenvalue_of(const OUModel& model, const Polynomial& f) {
  if (f.empty()) return 0.0;
  Polynomial lf = generator_poly(model, f);
  std::optional<double> mu;
  // every coefficient of lf must be -mu times the matching coefficient of f
  for (const auto& [k, c] : lf.coeffs()) {
    auto it = f.coeffs().find(k);
    if (it == f.coeffs().end() || it->second == 0.0) return std::nullopt;
    double ratio = -c / it->second;
    if (!mu) {
      mu = ratio;
    } else if (std::abs(*mu - ratio) > 1e-9 * (std::abs(*mu) + std::abs(ratio))) {
      return std::nullopt;
    }
  }
  if (!mu) return std::nullopt;
  for (const auto& [k, c] : f.coeffs()) {
    auto it = lf.coeffs().find(k);
    double lc = it == lf.coeffs().end() ? 0.0 : it->second;
    if (std::abs(lc + *mu * c) > 1e-9 * std::max(1.0, std::abs(c))) return std::nullopt;
  }
  return mu;
}

}  // namespace

RieszApplyResult apply_riesz(const OUModel& model, const MultiIndex& alpha, const TestFunction& f,
                             const Vec& x, const QuadSettings& quad, const SupportBall* support,
                             const RieszKernelConfig& cfg) {
  RieszApplyResult out;
  const int order = multi_order(alpha);

  if (f.kind == TestFunction::Kind::Polynomial) {
    TestFunction g = project_p0perp(model, f, quad);
    if (g.poly.empty()) {
      out.has_spectral_value = true;
      out.spectral_value = 0.0;
    } else if (auto mu = eigenvalue_of(model, g.poly)) {
      if (*mu <= 0.0) fail(ErrorCode::ComplexEigenvalueUnsupported, "nonpositive eigenvalue");
      out.has_spectral_value = true;
      out.spectral_value = std::pow(*mu, -0.5 * order) * g.poly.dalpha(alpha).eval(x);
    }
  }

  if (support) {
    if ((x - support->center).norm() <= support->radius)
      fail(ErrorCode::SupportOverlap, "kernel route requires x outside supp f");
    if (model.n > 2) fail(ErrorCode::QuadratureBudgetExceeded, "kernel route limited to n <= 2");

    RieszKernel kernel(model, alpha, cfg);
    CovCache cache(model);
    const QuadRule& rule = gauss_legendre(40);
    const int m = static_cast<int>(rule.nodes.size());
    const double log_norm =
        -0.5 * model.n * std::log(2.0 * 3.14159265358979323846) - 0.5 * model.Qinf_logdet;

    LogSum sum;
    if (model.n == 1) {
      double c = support->center[0], r = support->radius;
      for (int i = 0; i < m; ++i) {
        Vec u(1);
        u[0] = c + r * rule.nodes[i];
        double fu = f(u);
        if (fu == 0.0) continue;
        LogValue kv = kernel.eval(x, u, cache);
        double logw = std::log(r * rule.weights[i]) + log_norm - quad_form_r(model, u);
        sum.add(kv * LogValue::from_double(fu).scaled(logw));
      }
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Vec u = support->center;
          u[0] += support->radius * rule.nodes[i];
          u[1] += support->radius * rule.nodes[j];
          double fu = f(u);
          if (fu == 0.0) continue;
          LogValue kv = kernel.eval(x, u, cache);
          double logw = 2.0 * std::log(support->radius) +
                        std::log(rule.weights[i] * rule.weights[j]) + log_norm -
                        quad_form_r(model, u);
          sum.add(kv * LogValue::from_double(fu).scaled(logw));
        }
    }
    out.has_kernel_value = true;
    out.kernel_value = sum.value().to_double();
  }

  if (!out.has_kernel_value && !out.has_spectral_value)
    fail(ErrorCode::SupportOverlap,
         "no route available: f is not an eigen-polynomial and no support was declared");
  return out;
}

}  // namespace ougauss
