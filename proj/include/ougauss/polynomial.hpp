#pragma once

#include <functional>
#include <map>
#include <optional>

#include "ougauss/model.hpp"

namespace ougauss {

// Sparse multivariate polynomial: multiindex -> coefficient.
class Polynomial {
 public:
  using Key = std::vector<int>;

  explicit Polynomial(int n = 1) : n_(n) {}
  static Polynomial constant(int n, double c);
  static Polynomial monomial(const Key& alpha, double c = 1.0);
  static Polynomial linear(const Vec& v);  // x -> <v, x>

  int dim() const { return n_; }
  int degree() const;
  bool empty() const { return coeffs_.empty(); }
  const std::map<Key, double>& coeffs() const { return coeffs_; }

  void add_term(const Key& alpha, double c);
  double eval(const Vec& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double c) const;

  Polynomial derivative(int j) const;
  Polynomial dalpha(const std::vector<int>& alpha) const;

  // substitute x_i = sum_j A_ij y_j + b_i; the result lives in y (dim = A.cols())
  Polynomial substitute_affine(const Mat& A, const Vec& b) const;

  // E[p(z)] for z ~ N(mean, Sigma)
  double gaussian_mean(const Vec& mean, const Mat& Sigma) const;

 private:
  int n_;
  std::map<Key, double> coeffs_;
};

// E[prod z_i^{alpha_i}] for z ~ N(0, Sigma), by the Gaussian moment recursion
// E[z^a] = sum_j Sigma_ij (a_j - delta_ij) E[z^{a - e_i - e_j}].
double gaussian_moment(const Mat& Sigma, const std::vector<int>& alpha);

// Test function: either an exact polynomial (moment calculus available) or a
// black-box evaluator.
struct TestFunction {
  enum class Kind { Polynomial, Callable } kind = Kind::Polynomial;
  Polynomial poly{1};
  std::function<double(const Vec&)> call;
  int n = 1;

  static TestFunction from_poly(Polynomial p) {
    TestFunction f;
    f.kind = Kind::Polynomial;
    f.n = p.dim();
    f.poly = std::move(p);
    return f;
  }
  static TestFunction from_callable(int n, std::function<double(const Vec&)> fn) {
    TestFunction f;
    f.kind = Kind::Callable;
    f.n = n;
    f.call = std::move(fn);
    return f;
  }

  double operator()(const Vec& x) const {
    return kind == Kind::Polynomial ? poly.eval(x) : call(x);
  }
};

}  // namespace ougauss
