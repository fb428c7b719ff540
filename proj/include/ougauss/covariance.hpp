#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <unordered_map>

#include "ougauss/model.hpp"

namespace ougauss {

// Everything the kernel calculus needs at one time point. The fields beyond
// the covariance itself (expB, Dminus, delta) make kernel evaluation stable
// for arbitrarily large t: they only involve e^{tB}, which decays.
struct CovAtTime {
  double t = 0.0;
  Mat Qt;
  Mat Qt_inv;
  Mat Dt_diff_inv;     // Q_t^{-1} - Q_inf^{-1}, computed without cancellation
  double Qt_logdet = 0.0;

  Mat expB;            // e^{tB}
  Mat Dminus;          // D_{-t} = Qinf e^{tB^T} Qinf^{-1}
  Mat delta;           // Delta(t) = -e^{tB^T} Q_t^{-1} e^{tB}, symmetric negative definite
  Mat S;               // Qinf^{-1} - Delta(t); quadratic form of the kernel in D_{-t}u - x
};

// Q_t = int_0^t e^{sB} Q e^{sB^T} ds. Uses the Van Loan block exponential of
// [[B, Q], [0, -B^T]] for moderate t and the complement identity
// Q_t = Qinf - e^{tB} Qinf e^{tB^T} once ||tB|| is large enough that the
// block exponential would overflow.
CovAtTime covariance_qt(const OUModel& model, double t);

// D_t = Qinf e^{-tB^T} Qinf^{-1}, defined for all real t; |t| > 100 rejected.
Mat flow_dt(const OUModel& model, double t);

// The two alternative expressions for D_t valid for t > 0.
Mat flow_dt_via_qt(const OUModel& model, const CovAtTime& cov);        // (Qt^-1 - Qinf^-1)^-1 Qt^-1 e^{tB}
Mat flow_dt_via_expansion(const OUModel& model, const CovAtTime& cov); // e^{tB} + Qt e^{-tB^T} Qinf^-1

// Memoizes CovAtTime per exact time value, for quadrature loops that revisit
// the same nodes. One instance per run/thread; not internally synchronized.
class CovCache {
 public:
  explicit CovCache(const OUModel& model) : model_(model) {}

  const CovAtTime& at(double t) {
    std::uint64_t key;
    static_assert(sizeof(key) == sizeof(t));
    std::memcpy(&key, &t, sizeof(t));
    auto it = map_.find(key);
    if (it != map_.end()) return *it->second;
    auto cov = std::make_unique<CovAtTime>(covariance_qt(model_, t));
    return *map_.emplace(key, std::move(cov)).first->second;
  }

  const OUModel& model() const { return model_; }
  std::size_t size() const { return map_.size(); }

 private:
  const OUModel& model_;
  std::unordered_map<std::uint64_t, std::unique_ptr<CovAtTime>> map_;
};

}  // namespace ougauss
