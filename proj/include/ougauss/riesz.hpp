#pragma once

#include "ougauss/ledger.hpp"
#include "ougauss/quadrature.hpp"
#include "ougauss/semigroup.hpp"

namespace ougauss {

struct RieszKernelConfig {
  double split_time = 1.0;          // where the small-t / large-t parts separate
  double rel_tol = 1e-8;
  double tail_cutoff = 10.0;        // upper tau limit, t = e^tau
  double near_diagonal_guard = 1e-8;

  // numerical window controls
  double scan_floor = -46.0;        // lowest tau examined
  double scan_step = 0.125;
  double window_nats = 40.0;        // integrand kept within this range of its peak
  int min_panels = 16;
  int max_panels = 1 << 14;

  void validate() const {
    if (!(split_time > 0.0)) fail(ErrorCode::QuadratureDivergence, "split_time must be > 0");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2))
      fail(ErrorCode::QuadratureDivergence, "rel_tol must lie in (0, 1e-2]");
  }
};

struct RieszKernelValue {
  LogValue whole;
  LogValue part_small;  // integral over (0, split_time]
  LogValue part_large;  // integral over [split_time, infinity)
};

// Kernel of R^(alpha):
//   R_alpha(x,u) = (1/Gamma(|alpha|/2)) int_0^inf t^{(|alpha|-2)/2} D^alpha_x K_t(x,u) dt.
// The whole value is the signed sum of the two split parts, so additivity is
// exact by construction.
class RieszKernel {
 public:
  RieszKernel(const OUModel& model, MultiIndex alpha, RieszKernelConfig cfg = {});

  RieszKernelValue eval_parts(const Vec& x, const Vec& u, CovCache& cache) const;
  LogValue eval(const Vec& x, const Vec& u, CovCache& cache) const;

  const MultiIndex& alpha() const { return alpha_; }
  const DerivTermLedger& ledger() const { return ledger_; }
  const RieszKernelConfig& config() const { return cfg_; }

 private:
  LogValue integrand(double tau, const Vec& x, const Vec& u, CovCache& cache) const;

  const OUModel& model_;
  MultiIndex alpha_;
  RieszKernelConfig cfg_;
  DerivTermLedger ledger_;
  double log_gamma_norm_;
};

// Convenience wrappers matching the one-shot call style.
LogValue riesz_kernel(const OUModel& model, const MultiIndex& alpha, const Vec& x, const Vec& u,
                      const RieszKernelConfig& cfg = {});
RieszKernelValue riesz_kernel_parts(const OUModel& model, const MultiIndex& alpha, const Vec& x,
                                    const Vec& u, const RieszKernelConfig& cfg = {});

// Smooth local/global cutoff: 1 on L_A, 0 outside L_{2A}, piecewise-quintic
// C^2 profile in r = |x-u|(1+|x|)/A with |grad_x eta| + |grad_u eta| <=
// gradient_bound()/|x-u|.
struct CutoffEta {
  double A = 1.0;
  double gradient_bound() const { return 7.5 * (1.0 + A); }
};

double eval_cutoff(const CutoffEta& eta, const OUModel& model, const Vec& x, const Vec& u);

// Optional support metadata for the kernel route of apply_riesz.
struct SupportBall {
  Vec center;
  double radius = 0.0;
};

struct RieszApplyResult {
  bool has_kernel_value = false;
  double kernel_value = 0.0;
  bool has_spectral_value = false;
  double spectral_value = 0.0;
};

// R_alpha f(x). For polynomial eigenfunctions of L the exact spectral value
// D^alpha (-L)^{-|alpha|/2} P0perp f is returned; when `support` is given and
// x lies outside it, the off-diagonal kernel route
// int R_alpha(x,u) f(u) dgamma_inf(u) is evaluated by tensor quadrature
// over the support ball.
RieszApplyResult apply_riesz(const OUModel& model, const MultiIndex& alpha, const TestFunction& f,
                             const Vec& x, const QuadSettings& quad = QuadSettings(),
                             const SupportBall* support = nullptr,
                             const RieszKernelConfig& cfg = {});

}  // namespace ougauss
