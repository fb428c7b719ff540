#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ougauss {

// Signed value in log space: value = sign * exp(logmag).
// sign = 0 encodes exact zero (logmag = -inf). Quantities of size e^{R(x)}
// with R(x) of order several hundred stay representable.
struct LogValue {
  int sign = 0;
  double logmag = -std::numeric_limits<double>::infinity();

  LogValue() = default;
  LogValue(int s, double lm) : sign(s), logmag(lm) {
    if (sign == 0) logmag = -std::numeric_limits<double>::infinity();
  }

  static LogValue zero() { return LogValue(); }
  static LogValue one() { return LogValue(1, 0.0); }

  static LogValue from_double(double v) {
    if (v == 0.0 || !std::isfinite(v)) {
      if (std::isnan(v)) return LogValue(0, std::numeric_limits<double>::quiet_NaN());
      if (std::isinf(v)) return LogValue(v > 0 ? 1 : -1, std::numeric_limits<double>::infinity());
      return zero();
    }
    return LogValue(v > 0 ? 1 : -1, std::log(std::abs(v)));
  }

  // Sign and log of |v| supplied separately (v itself may not be representable).
  static LogValue from_sign_log(int s, double lm) { return LogValue(s, lm); }

  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(logmag);
  }

  bool is_zero() const { return sign == 0; }
  bool finite() const { return sign == 0 || std::isfinite(logmag); }

  LogValue operator*(const LogValue& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return LogValue(sign * o.sign, logmag + o.logmag);
  }
  LogValue& operator*=(const LogValue& o) { return *this = *this * o; }

  LogValue operator-() const { return LogValue(-sign, logmag); }

  LogValue abs() const { return LogValue(sign == 0 ? 0 : 1, logmag); }

  // exp(k) scaling
  LogValue scaled(double log_factor) const {
    if (sign == 0) return zero();
    return LogValue(sign, logmag + log_factor);
  }

  LogValue operator+(const LogValue& o) const {
    if (sign == 0) return o;
    if (o.sign == 0) return *this;
    const LogValue& a = logmag >= o.logmag ? *this : o;
    const LogValue& b = logmag >= o.logmag ? o : *this;
    double r = std::exp(b.logmag - a.logmag);  // r in [0,1]
    double s = 1.0 + (a.sign == b.sign ? r : -r);
    if (s == 0.0) return zero();
    return LogValue(s > 0 ? a.sign : -a.sign, a.logmag + std::log(std::abs(s)));
  }
  LogValue& operator+=(const LogValue& o) { return *this = *this + o; }
  LogValue operator-(const LogValue& o) const { return *this + (-o); }
};

inline bool log_less(const LogValue& a, const LogValue& b) {
  // compares |a| < |b|
  if (a.sign == 0) return b.sign != 0;
  if (b.sign == 0) return false;
  return a.logmag < b.logmag;
}

// Accumulates a signed sum in log space. Two-pass log-sum-exp: the running
// one-pass sum loses accuracy when terms cancel; keeping all terms and
// reducing against the global max keeps the relative error near machine eps.
class LogSum {
 public:
  void add(const LogValue& v) {
    if (v.sign == 0) return;
    terms_.push_back(v);
  }
  void add_scaled(const LogValue& v, double log_factor) {
    if (v.sign == 0) return;
    terms_.push_back(v.scaled(log_factor));
  }

  LogValue value() const {
    if (terms_.empty()) return LogValue::zero();
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::max(m, t.logmag);
    if (!std::isfinite(m)) return terms_.front();
    double s = 0.0;
    for (const auto& t : terms_) s += t.sign * std::exp(t.logmag - m);
    if (s == 0.0) return LogValue::zero();
    return LogValue(s > 0 ? 1 : -1, m + std::log(std::abs(s)));
  }

  // log of sum of |terms|; useful for L1-style error control
  LogValue abs_value() const {
    if (terms_.empty()) return LogValue::zero();
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::max(m, t.logmag);
    if (!std::isfinite(m)) return LogValue(1, m);
    double s = 0.0;
    for (const auto& t : terms_) s += std::exp(t.logmag - m);
    return LogValue(1, m + std::log(s));
  }

  void clear() { terms_.clear(); }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<LogValue> terms_;
};

}  // namespace ougauss
