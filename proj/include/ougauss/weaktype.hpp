#pragma once

#include "ougauss/riesz.hpp"

namespace ougauss {

enum class WeakTypeMode { PolarGrid, MonteCarlo };

struct WeakTypeConfig {
  double shell_halfwidth = 6.0;   // level-set domain: R(x) within this of R(x0)
  double lambda_span_decades = 6.0;
  int lambda_per_span = 64;       // geometric points per 6 decades
  int max_lambda_points = 4096;
  int resolution_order = 32;      // sweep capped at the k-th largest grid value
  int polar_s_points = 2000;      // n = 1: s cells per branch
  int polar_theta_points = 96;    // n = 2
  int polar_s_points_2d = 160;    // n = 2: s cells per theta
  long mc_points = 1000000;
  int mc_strata = 24;
  double t0 = -1.0;               // < 0: choose by the drift scan
  RieszKernelConfig kernel = [] {
    RieszKernelConfig k;
    k.rel_tol = 1e-6;
    return k;
  }();
};

struct WeakTypeProfile {
  MultiIndex alpha;
  WeakTypeMode mode = WeakTypeMode::PolarGrid;
  double t0 = 0.0;
  std::vector<double> eta_grid;
  std::vector<double> x0_norm;        // |D_{-t0} u0| per eta
  std::vector<double> quasinorm;      // sup_lambda lambda * gamma{|R_alpha(.,u0)| > lambda}
  std::vector<double> lambda_at_sup;  // where the sup was attained
  double fit_slope = 0.0;             // log quasinorm regressed on log |x0|
  double shell_truncation_rel = 0.0;  // e^{-shell_halfwidth}, recorded
};

// t0 in (0, 1/2) with <(1,..,1), e^{t0 B} e_j> > 1/2 for all j: the grid
// {0.05 k} is scanned downward for the first point clearing 3/4 (a margin of
// 1/4); if none qualifies, upward for the first point clearing 1/2.
double find_t0(const OUModel& model);

WeakTypeProfile weak_type_profile(const OUModel& model, const MultiIndex& alpha,
                                  const std::vector<double>& eta_grid, WeakTypeMode mode,
                                  std::uint64_t seed, const WeakTypeConfig& cfg = {});

struct CounterexampleReport {
  MultiIndex alpha;
  double t0 = 0.0;
  std::vector<double> eta_grid;
  std::vector<double> x0_norm;
  std::vector<double> floor_min;        // min of R_alpha(x,u0) e^{-R(x)} |x|^{-(|alpha|-1)} over the ball
  std::vector<double> dominant_ratio;   // positive leading term over the summed bounds of the rest
  std::vector<double> geometry_const;   // gamma(V_{x0}) e^{R(x0)} |x0|
  double floor_overall = 0.0;
  bool dominant_ok = false;   // dominant term exceeds the rest at every eta
  double geometry_band = 0.0; // max/min of geometry_const
};

struct CounterexampleConfig {
  double ball_shrink = 0.9;  // sample radius as a fraction of sqrt(t0)
  int ball_points = 33;
  double vset_c = 0.5;       // the constant c in the V_{x0} definition
  double t0 = -1.0;
  RieszKernelConfig kernel = [] {
    RieszKernelConfig k;
    k.rel_tol = 1e-8;
    return k;
  }();
};

CounterexampleReport counterexample_run(const OUModel& model, const MultiIndex& alpha,
                                        const std::vector<double>& eta_grid, std::uint64_t seed,
                                        const CounterexampleConfig& cfg = {});

}  // namespace ougauss
