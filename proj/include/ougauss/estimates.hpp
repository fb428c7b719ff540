#pragma once

#include <string>
#include <vector>

#include "ougauss/riesz.hpp"

namespace ougauss {

struct WorstPoint {
  double ratio = 0.0;
  double t = 0.0;
  double x_norm = 0.0;
  double u_norm = 0.0;
};

struct EstimateReport {
  std::string estimate_id;
  long n_samples = 0;
  double fitted_lower = 0.0;
  double fitted_upper = 0.0;
  long violations = 0;
  std::vector<WorstPoint> worst_ratio_points;
  std::string notes;  // rates used, sampling domain; goes to the manifest, not the CSV
};

// Exponent rates derived from the model spectrum; every bound with an
// unspecified constant in the exponential uses one of these, recorded in the
// report notes.
struct ModelRates {
  double c_decay = 0.0;        // 0.9 * |max Re eig(B)|
  double c_gauss_small = 0.0;  // min over t in (0,1] of t*lambda_min(Qt^-1 - Qinf^-1)/2
  double C_gauss_small = 0.0;  // max over t in (0,1] of t*lambda_max(...)/2
  double C_q_large = 0.0;      // max over t in [1,30] of lambda_max(Qinf^{1/2} S_t Qinf^{1/2})/2
  double B_norm = 0.0;
};
ModelRates compute_rates(const OUModel& model);

struct EstimateDef {
  std::string id;
  std::string description;
  long default_samples = 0;
};

// Registered catalog of two-sided / one-sided bound probes.
const std::vector<EstimateDef>& estimate_catalog();

// Deterministic sampling probe for one catalog entry. Fits the extreme
// ratios over the sample cloud; a violation is a non-finite ratio (or, for
// the Calderon-Zygmund approach sequences, a blow-up along the scripted
// sequence).
EstimateReport estimate_probe(const OUModel& model, const std::string& estimate_id,
                              long n_samples, std::uint64_t seed);

}  // namespace ougauss
