#include "ougauss/weaktype.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ougauss/geometry.hpp"

namespace ougauss {

namespace {

constexpr double kPi = 3.14159265358979323846;

// monotone solve of R(D_s y) = target in s
double flow_time_to_level(const OUModel& model, const Vec& y, double target) {
  auto g = [&](double s) { return quad_form_r(model, flow_dt(model, s) * y); };
  double lo = 0.0, hi = 0.0;
  if (g(0.0) < target) {
    double step = 0.5;
    while (g(step) < target) {
      lo = step;
      step *= 2.0;
      if (step > 100.0) fail(ErrorCode::RootBracketFailure, "level unreachable (upward)");
    }
    hi = step;
  } else {
    double step = -0.5;
    while (g(step) > target) {
      hi = step;
      step *= 2.0;
      if (step < -100.0) fail(ErrorCode::RootBracketFailure, "level unreachable (downward)");
    }
    lo = step;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct GridCell {
  double logv;   // log |R_alpha(x, u0)|
  double logw;   // log of the gamma_inf mass of the cell
  double r_of_x; // R(x), for the shell-anchored sweep floor
};

// sup over the lambda sweep of lambda * gamma(v > lambda), all in log space.
struct SweepResult {
  double quasinorm = 0.0;
  double lambda_at_sup = 0.0;
};

SweepResult lambda_sweep(std::vector<GridCell>& cells, double shell_top_r,
                         const WeakTypeConfig& cfg) {
  std::sort(cells.begin(), cells.end(),
            [](const GridCell& a, const GridCell& b) { return a.logv > b.logv; });

  const int k = std::min<int>(cfg.resolution_order, static_cast<int>(cells.size()));
  if (k == 0) return {};
  double log_top = cells[k - 1].logv;

  // sweep floor anchored at the x0-shell's own scale
  double log_shell = -std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto& c : cells) {
    if (c.r_of_x <= shell_top_r) {
      log_shell = c.logv;  // cells are sorted by logv descending
      if (++count >= k) break;
    }
  }
  if (!std::isfinite(log_shell)) log_shell = log_top;
  double log_floor = log_shell - cfg.lambda_span_decades * std::log(10.0);
  if (log_floor >= log_top) log_floor = log_top - cfg.lambda_span_decades * std::log(10.0);

  int nlam = std::max(cfg.lambda_per_span,
                      static_cast<int>(cfg.lambda_per_span * (log_top - log_floor) /
                                       (cfg.lambda_span_decades * std::log(10.0))) + 1);
  nlam = std::min(nlam, cfg.max_lambda_points);

  // prefix log-sum-exp of weights in decreasing-v order
  std::vector<double> prefix(cells.size());
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& c : cells) m = std::max(m, c.logw);
  double acc = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    acc += std::exp(cells[i].logw - m);
    prefix[i] = m + std::log(acc);
  }

  SweepResult out;
  for (int j = 0; j < nlam; ++j) {
    double loglam = log_floor + (log_top - log_floor) * j / (nlam - 1.0);
    // first index with logv <= loglam
    auto it = std::lower_bound(cells.begin(), cells.end(), loglam,
                               [](const GridCell& c, double v) { return c.logv > v; });
    std::size_t idx = static_cast<std::size_t>(it - cells.begin());
    if (idx == 0) continue;
    double lg = loglam + prefix[idx - 1];
    if (lg > std::log(out.quasinorm == 0.0 ? 1e-300 : out.quasinorm)) {
      out.quasinorm = std::exp(lg);
      out.lambda_at_sup = std::exp(loglam);
    }
  }
  return out;
}

double ols_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
  double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double find_t0(const OUModel& model) {
  Vec ones = Vec::Ones(model.n);
  auto margin = [&](double t) {
    Mat etb = (t * model.B).exp();
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < model.n; ++j) worst = std::min(worst, ones.dot(etb.col(j)));
    return worst;
  };
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 9; k >= 1; --k) {
    double t = 0.05 * k;
    double m = margin(t);
    best = std::max(best, m);
    if (m > 0.75) return t;
  }
  for (int k = 1; k <= 9; ++k) {
    double t = 0.05 * k;
    double m = margin(t);
    best = std::max(best, m);
    if (m > 0.5) return t;
  }
  fail(ErrorCode::T0NotFound,
       "no t0 in (0,1/2) satisfies the drift condition; max inner product " +
           std::to_string(best));
}

WeakTypeProfile weak_type_profile(const OUModel& model, const MultiIndex& alpha,
                                  const std::vector<double>& eta_grid, WeakTypeMode mode,
                                  std::uint64_t seed, const WeakTypeConfig& cfg) {
  if (multi_order(alpha) < 1) fail(ErrorCode::EmptyMultiindex, "|alpha| >= 1 required");
  if (mode == WeakTypeMode::PolarGrid && model.n > 2)
    fail(ErrorCode::GridBudgetExceeded, "polar grid mode requires n <= 2");

  WeakTypeProfile prof;
  prof.alpha = alpha;
  prof.mode = mode;
  prof.eta_grid = eta_grid;
  prof.t0 = cfg.t0 > 0.0 ? cfg.t0 : find_t0(model);
  prof.shell_truncation_rel = std::exp(-cfg.shell_halfwidth);

  RieszKernel kernel(model, alpha, cfg.kernel);
  const double log_dens_norm =
      -0.5 * model.n * std::log(2.0 * kPi) - 0.5 * model.Qinf_logdet;

  for (std::size_t ei = 0; ei < eta_grid.size(); ++ei) {
    const double eta = eta_grid[ei];
    Vec u0 = model.Qinf * Vec::Constant(model.n, eta);
    Vec x0 = flow_dt(model, -prof.t0) * u0;
    const double R0 = quad_form_r(model, x0);
    const double Ru = quad_form_r(model, u0);
    // shell bottom per the half-width; top extended so the near-diagonal
    // plateau at u0 participates in the sup (see the run notes)
    const double r_lo = std::max(R0 - cfg.shell_halfwidth, 1e-3);
    const double r_hi = std::max(R0 + cfg.shell_halfwidth, Ru + 3.0);
    const double shell_top = R0 + cfg.shell_halfwidth;

    CovCache cache(model);
    std::vector<GridCell> cells;

    auto add_cell = [&](const Vec& x, double log_mass) {
      LogValue v = kernel.eval(x, u0, cache);
      if (v.sign == 0) return;
      cells.push_back(GridCell{v.logmag, log_mass, quad_form_r(model, x)});
    };

    if (mode == WeakTypeMode::PolarGrid) {
      const double beta = R0;
      std::vector<Vec> anchors;
      std::vector<double> arc;  // surface measure weight per anchor
      if (model.n == 1) {
        double a = std::sqrt(2.0 * beta * model.Qinf(0, 0));
        anchors.push_back(Vec::Constant(1, a));
        anchors.push_back(Vec::Constant(1, -a));
        arc.assign(2, 1.0);
      } else {
        const int ntheta = cfg.polar_theta_points;
        for (int i = 0; i < ntheta; ++i) {
          double th = 2.0 * kPi * (i + 0.5) / ntheta;
          Vec omega(2);
          omega << std::cos(th), std::sin(th);
          Vec xt = std::sqrt(2.0 * beta) * (model.Qinf_sqrt * omega);
          Vec domega(2);
          domega << -std::sin(th), std::cos(th);
          double darc = (std::sqrt(2.0 * beta) * (model.Qinf_sqrt * domega)).norm() *
                        (2.0 * kPi / ntheta);
          anchors.push_back(xt);
          arc.push_back(darc);
        }
      }
      const int ns = model.n == 1 ? cfg.polar_s_points : cfg.polar_s_points_2d;
      for (std::size_t ai = 0; ai < anchors.size(); ++ai) {
        const Vec& xt = anchors[ai];
        double s_lo = flow_time_to_level(model, xt, r_lo);
        double s_hi = flow_time_to_level(model, xt, r_hi);
        double ds = (s_hi - s_lo) / ns;
        for (int j = 0; j < ns; ++j) {
          double s = s_lo + (j + 0.5) * ds;
          Vec x = flow_dt(model, s) * xt;
          PolarPoint p{s, xt, beta, 0.0};
          double w = polar_volume_element(model, p);
          double log_mass = log_dens_norm - quad_form_r(model, x) + std::log(w) +
                            std::log(ds) + std::log(arc[ai]);
          add_cell(x, log_mass);
        }
      }
    } else {
      // stratified importance sampling in R = |z|^2/2, z standard normal:
      // R ~ Gamma(n/2, 1); R uniform within each stratum, direction uniform.
      const int K = cfg.mc_strata;
      const long per = std::max<long>(1, cfg.mc_points / K);
      const double lg_norm = std::lgamma(0.5 * model.n);
      for (int kstr = 0; kstr < K; ++kstr) {
        double a = r_lo + (r_hi - r_lo) * kstr / K;
        double b = r_lo + (r_hi - r_lo) * (kstr + 1) / K;
        for (long i = 0; i < per; ++i) {
          Rng rng = Rng::for_point(seed + 7919 * ei, kstr * per + i);
          double R = rng.uniform(a, b);
          Vec dir = rng.normal_vec(model.n);
          double nrm = dir.norm();
          if (nrm < 1e-12) continue;
          dir /= nrm;
          Vec x = model.Qinf_sqrt * (std::sqrt(2.0 * R) * dir);
          // log of pdf_Gamma(n/2,1)(R) * (b-a)/per
          double log_mass = (0.5 * model.n - 1.0) * std::log(R) - R - lg_norm +
                            std::log((b - a) / static_cast<double>(per));
          add_cell(x, log_mass);
        }
      }
    }

    SweepResult sw = lambda_sweep(cells, shell_top, cfg);
    prof.x0_norm.push_back(x0.norm());
    prof.quasinorm.push_back(sw.quasinorm);
    prof.lambda_at_sup.push_back(sw.lambda_at_sup);
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < prof.quasinorm.size(); ++i) {
    if (prof.quasinorm[i] > 0.0) {
      lx.push_back(std::log(prof.x0_norm[i]));
      ly.push_back(std::log(prof.quasinorm[i]));
    }
  }
  if (lx.size() >= 2) prof.fit_slope = ols_slope(lx, ly);
  return prof;
}

CounterexampleReport counterexample_run(const OUModel& model, const MultiIndex& alpha,
                                        const std::vector<double>& eta_grid, std::uint64_t seed,
                                        const CounterexampleConfig& cfg) {
  const int order = multi_order(alpha);
  if (order <= 2) fail(ErrorCode::EmptyMultiindex, "counterexample requires |alpha| > 2");

  CounterexampleReport rep;
  rep.alpha = alpha;
  rep.eta_grid = eta_grid;
  rep.t0 = cfg.t0 > 0.0 ? cfg.t0 : find_t0(model);

  RieszKernel kernel(model, alpha, cfg.kernel);
  const DerivTermLedger& ledger = kernel.ledger();
  const double lgam = std::lgamma(0.5 * order);
  const double log_dens_norm =
      -0.5 * model.n * std::log(2.0 * kPi) - 0.5 * model.Qinf_logdet;

  rep.floor_overall = std::numeric_limits<double>::infinity();

  for (std::size_t ei = 0; ei < eta_grid.size(); ++ei) {
    const double eta = eta_grid[ei];
    Vec u0 = model.Qinf * Vec::Constant(model.n, eta);
    Vec x0 = flow_dt(model, -rep.t0) * u0;
    const double R0 = quad_form_r(model, x0);
    const double rad = cfg.ball_shrink * std::sqrt(rep.t0);
    CovCache cache(model);

    // positivity floor over a deterministic ball sample
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.ball_points; ++i) {
      Vec x;
      if (model.n == 1) {
        x = x0 + Vec::Constant(1, rad * (2.0 * (i + 0.5) / cfg.ball_points - 1.0));
      } else {
        Rng rng = Rng::for_point(seed, i);
        Vec dir = rng.normal_vec(model.n);
        dir /= dir.norm();
        x = x0 + rad * ((i + 0.5) / cfg.ball_points) * dir;
      }
      LogValue v = kernel.eval(x, u0, cache);
      double val = v.sign *
                   std::exp(v.logmag - quad_form_r(model, x) - (order - 1) * std::log(x.norm()));
      floor = std::min(floor, val);
    }
    rep.floor_min.push_back(floor);
    rep.floor_overall = std::min(rep.floor_overall, floor);

    // dominant-term audit at x0: the all-(Qinf^{-1}x) product with no Delta
    // factors versus the summed absolute bounds of every other contribution
    Vec a_vec = model.Qinf_inv * x0;
    double log_main_prod = 0.0;
    bool main_positive = true;
    for (int j = 0; j < model.n; ++j) {
      if (alpha[j] == 0) continue;
      if (a_vec[j] <= 0.0) main_positive = false;
      log_main_prod += alpha[j] * std::log(std::abs(a_vec[j]));
    }
    // the positive mechanism lives on t in (0,1); everything at t > 1 is
    // charged to the "remaining" side as an absolute bound
    auto main_integrand = [&](double tau) -> LogValue {
      double t = std::exp(tau);
      const CovAtTime& cov = cache.at(t);
      LogValue K = log_mehler(model, cov, x0, u0);
      return K.scaled(log_main_prod + 0.5 * order * tau - lgam);
    };
    auto rest_small_integrand = [&](double tau) -> LogValue {
      double t = std::exp(tau);
      const CovAtTime& cov = cache.at(t);
      MehlerParts parts = mehler_parts(model, cov, x0, u0);
      Vec b = parts.P - a_vec;
      // sum over terms of |coeff| prod_j (|a_j| + |b_j|) prod |Delta|, minus
      // the pure main product
      LogSum sum;
      for (const auto& term : ledger.terms) {
        LogValue v = LogValue::from_double(static_cast<double>(term.coeff)).abs();
        for (int j : term.p_indices)
          v *= LogValue::from_double(std::abs(a_vec[j]) + std::abs(b[j]));
        for (const auto& [i, j] : term.delta_pairs)
          v *= LogValue::from_double((*parts.delta)(i, j)).abs();
        sum.add(v);
      }
      sum.add(LogValue(-1, log_main_prod));
      return parts.logK.abs() * sum.value().scaled(0.5 * order * tau - lgam);
    };
    auto tail_integrand = [&](double tau) -> LogValue {
      double t = std::exp(tau);
      const CovAtTime& cov = cache.at(t);
      MehlerParts parts = mehler_parts(model, cov, x0, u0);
      return parts.logK * eval_terms_abs(ledger, parts).scaled(0.5 * order * tau - lgam);
    };
    LogValue s_main =
        integrate_log(main_integrand, cfg.kernel.scan_floor, 0.0, 1e-7, 64, 1 << 14).value;
    LogValue s_rest =
        integrate_log(rest_small_integrand, cfg.kernel.scan_floor, 0.0, 1e-7, 64, 1 << 14)
            .value +
        integrate_log(tail_integrand, 0.0, cfg.kernel.tail_cutoff, 1e-7, 64, 1 << 14).value;
    double ratio = (s_rest.sign == 0)
                       ? std::numeric_limits<double>::infinity()
                       : s_main.sign * std::exp(s_main.logmag - s_rest.logmag);
    if (!main_positive || !(s_main.sign > 0)) ratio = -std::abs(ratio);
    rep.dominant_ratio.push_back(ratio);

    // geometry of V_{x0} = {D_s xt : R(xt)=R0, |xt - x0| < c, 0 < s < c/|x0|^2}
    const double c = cfg.vset_c;
    const double s_max = c / x0.squaredNorm();
    double gamma_v = 0.0;
    auto slab = [&](const Vec& xt, double surface_w) {
      return integrate_scalar(
                 [&](double s) {
                   Vec x = flow_dt(model, s) * xt;
                   PolarPoint p{s, xt, R0, 0.0};
                   return std::exp(log_dens_norm - quad_form_r(model, x)) *
                          polar_volume_element(model, p);
                 },
                 0.0, s_max, 1e-8, 8, 1 << 10) *
             surface_w;
    };
    if (model.n == 1) {
      gamma_v = slab(x0, 1.0);
    } else {
      // arc of E_{R0} within distance c of x0
      const int ntheta = 512;
      PolarPoint p0 = to_polar(model, x0, R0);
      for (int i = 0; i < ntheta; ++i) {
        double th = 2.0 * kPi * (i + 0.5) / ntheta;
        Vec omega(2);
        omega << std::cos(th), std::sin(th);
        Vec xt = std::sqrt(2.0 * R0) * (model.Qinf_sqrt * omega);
        if ((xt - x0).norm() >= c) continue;
        Vec domega(2);
        domega << -std::sin(th), std::cos(th);
        double darc =
            (std::sqrt(2.0 * R0) * (model.Qinf_sqrt * domega)).norm() * (2.0 * kPi / ntheta);
        gamma_v += slab(xt, darc);
      }
      (void)p0;
    }
    rep.geometry_const.push_back(gamma_v * std::exp(R0) * x0.norm());
    rep.x0_norm.push_back(x0.norm());
  }

  // dominance sets in for large eta; require it at the top of the grid and a
  // non-shrinking trend across the grid (per-eta ratios are in the report)
  rep.dominant_ok = !rep.dominant_ratio.empty() && rep.dominant_ratio.back() > 1.0 &&
                    rep.dominant_ratio.back() >= rep.dominant_ratio.front();

  double gmin = *std::min_element(rep.geometry_const.begin(), rep.geometry_const.end());
  double gmax = *std::max_element(rep.geometry_const.begin(), rep.geometry_const.end());
  rep.geometry_band = gmax / gmin;
  return rep;
}

}  // namespace ougauss
