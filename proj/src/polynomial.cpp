#include "ougauss/polynomial.hpp"

#include <cmath>

namespace ougauss {

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Key(n, 0), c);
  return p;
}

Polynomial Polynomial::monomial(const Key& alpha, double c) {
  Polynomial p(static_cast<int>(alpha.size()));
  p.add_term(alpha, c);
  return p;
}

Polynomial Polynomial::linear(const Vec& v) {
  Polynomial p(static_cast<int>(v.size()));
  for (int j = 0; j < v.size(); ++j) {
    Key k(v.size(), 0);
    k[j] = 1;
    p.add_term(k, v[j]);
  }
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : coeffs_) {
    int s = 0;
    for (int a : k) s += a;
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(const Key& alpha, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

double Polynomial::eval(const Vec& x) const {
  double total = 0.0;
  for (const auto& [k, c] : coeffs_) {
    double term = c;
    for (int j = 0; j < n_; ++j)
      for (int rep = 0; rep < k[j]; ++rep) term *= x[j];
    total += term;
  }
  return total;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [k, c] : o.coeffs_) out.add_term(k, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [k, c] : o.coeffs_) out.add_term(k, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(n_);
  for (const auto& [ka, ca] : coeffs_)
    for (const auto& [kb, cb] : o.coeffs_) {
      Key k(n_);
      for (int j = 0; j < n_; ++j) k[j] = ka[j] + kb[j];
      out.add_term(k, ca * cb);
    }
  return out;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial out(n_);
  for (const auto& [k, v] : coeffs_) out.add_term(k, v * c);
  return out;
}

Polynomial Polynomial::derivative(int j) const {
  Polynomial out(n_);
  for (const auto& [k, c] : coeffs_) {
    if (k[j] == 0) continue;
    Key kd = k;
    kd[j] -= 1;
    out.add_term(kd, c * k[j]);
  }
  return out;
}

Polynomial Polynomial::dalpha(const std::vector<int>& alpha) const {
  Polynomial out = *this;
  for (int j = 0; j < n_; ++j)
    for (int rep = 0; rep < alpha[j]; ++rep) out = out.derivative(j);
  return out;
}

Polynomial Polynomial::substitute_affine(const Mat& A, const Vec& b) const {
  const int m = static_cast<int>(A.cols());
  // x_i -> row polynomial in y
  std::vector<Polynomial> rows;
  rows.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    Polynomial r = Polynomial::constant(m, b[i]);
    for (int j = 0; j < m; ++j) {
      Key k(m, 0);
      k[j] = 1;
      r.add_term(k, A(i, j));
    }
    rows.push_back(std::move(r));
  }
  Polynomial out(m);
  for (const auto& [k, c] : coeffs_) {
    Polynomial term = Polynomial::constant(m, c);
    for (int i = 0; i < n_; ++i)
      for (int rep = 0; rep < k[i]; ++rep) term = term * rows[i];
    out = out + term;
  }
  return out;
}

namespace {

double moment_rec(const Mat& Sigma, std::vector<int>& a,
                  std::map<std::vector<int>, double>& memo) {
  int order = 0, first = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    order += a[i];
    if (first < 0 && a[i] > 0) first = static_cast<int>(i);
  }
  if (order == 0) return 1.0;
  if (order % 2 == 1) return 0.0;
  auto it = memo.find(a);
  if (it != memo.end()) return it->second;

  // E[z_i g(z)] = sum_j Sigma_ij E[d_j g]
  double total = 0.0;
  const int i = first;
  a[i] -= 1;
  for (int j = 0; j < static_cast<int>(a.size()); ++j) {
    int aj = a[j];
    if (aj == 0) continue;
    a[j] -= 1;
    total += Sigma(i, j) * aj * moment_rec(Sigma, a, memo);
    a[j] += 1;
  }
  a[i] += 1;
  memo[a] = total;
  return total;
}

}  // namespace

double gaussian_moment(const Mat& Sigma, const std::vector<int>& alpha) {
  std::map<std::vector<int>, double> memo;
  std::vector<int> a = alpha;
  return moment_rec(Sigma, a, memo);
}

double Polynomial::gaussian_mean(const Vec& mean, const Mat& Sigma) const {
  // shift to centered variable first
  Polynomial centered =
      mean.isZero(0.0) ? *this : substitute_affine(Mat::Identity(n_, n_), mean);
  double total = 0.0;
  std::map<std::vector<int>, double> memo;
  for (const auto& [k, c] : centered.coeffs_) {
    std::vector<int> a = k;
    total += c * moment_rec(Sigma, a, memo);
  }
  return total;
}

}  // namespace ougauss
