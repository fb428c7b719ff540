#include "ougauss/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

namespace ougauss {

namespace {

QuadRule golub_welsch(const Vec& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Mat J = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  QuadRule r;
  r.nodes = es.eigenvalues();
  r.weights = Vec(n);
  for (int i = 0; i < n; ++i) {
    double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Vec off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return cache.emplace(order, golub_welsch(off, 2.0)).first->second;
}

const QuadRule& gauss_hermite_prob(int order) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Vec off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  return cache.emplace(order, golub_welsch(off, 1.0)).first->second;
}

namespace {

LogValue composite_gl(const std::function<LogValue(double)>& f, double a, double b,
                      int panels, const QuadRule& rule) {
  const double h = (b - a) / panels;
  LogSum sum;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < rule.nodes.size(); ++i) {
      LogValue v = f(mid + 0.5 * h * rule.nodes[i]);
      sum.add_scaled(v, std::log(0.5 * h * rule.weights[i]));
    }
  }
  return sum.value();
}

}  // namespace

LogIntegral integrate_log(const std::function<LogValue(double)>& f, double a, double b,
                          double rel_tol, int min_panels, int max_panels) {
  const QuadRule& rule = gauss_legendre(15);
  LogIntegral out;
  LogValue prev = composite_gl(f, a, b, min_panels, rule);
  for (int panels = 2 * min_panels; panels <= max_panels; panels *= 2) {
    LogValue cur = composite_gl(f, a, b, panels, rule);
    out.value = cur;
    out.previous = prev;
    out.panels = panels;
    LogValue diff = cur - prev;
    // |cur - prev| <= rel_tol * |cur|, handled in log space; two zero
    // estimates in a row count as converged.
    if (diff.sign == 0 || (cur.sign != 0 && diff.logmag <= cur.logmag + std::log(rel_tol)) ||
        (cur.sign == 0 && prev.sign == 0)) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  return out;  // converged = false; caller decides whether to fail
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int min_panels, int max_panels) {
  const QuadRule& rule = gauss_legendre(15);
  auto pass = [&](int panels) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (int i = 0; i < rule.nodes.size(); ++i)
        total += 0.5 * h * rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    return total;
  };
  double prev = pass(min_panels);
  for (int panels = 2 * min_panels; panels <= max_panels; panels *= 2) {
    double cur = pass(panels);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
  state_ = splitmix64(state_);
  return state_;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do { u1 = uniform(); } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Vec Rng::normal_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

}  // namespace ougauss
