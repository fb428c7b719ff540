#pragma once

#include <functional>

#include "ougauss/logvalue.hpp"
#include "ougauss/model.hpp"

namespace ougauss {

struct QuadRule {
  Vec nodes;
  Vec weights;
};

// Gauss-Legendre on [-1, 1] (Golub-Welsch; cached per order).
const QuadRule& gauss_legendre(int order);

// Gauss-Hermite for the standard normal weight: sum w_i f(z_i) = E[f(Z)],
// Z ~ N(0,1). Exact for polynomials of degree <= 2*order - 1.
const QuadRule& gauss_hermite_prob(int order);

// Result of an adaptive log-domain integral.
struct LogIntegral {
  LogValue value;
  LogValue previous;  // estimate at half the panel count
  int panels = 0;
  bool converged = false;
};

// integral of f over [a,b] where f returns sign/log values. Uniform composite
// Gauss-Legendre, panel count doubled until two successive estimates agree to
// rel_tol. Node sets repeat across calls with the same interval, which keeps
// CovAtTime memoization effective.
LogIntegral integrate_log(const std::function<LogValue(double)>& f, double a, double b,
                          double rel_tol, int min_panels = 8, int max_panels = 1 << 14);

// Same driver for ordinary positive/smooth scalar integrands.
double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int min_panels = 8, int max_panels = 1 << 14);

// Deterministic RNG utilities. std::mt19937_64 seeded per point via splitmix
// so results are independent of sampling order / worker count.
std::uint64_t splitmix64(std::uint64_t state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  static Rng for_point(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  double uniform();                    // [0,1)
  double uniform(double a, double b);  // [a,b)
  double normal();                     // Box-Muller, deterministic
  Vec normal_vec(int n);

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ougauss
