#include "ougauss/ledger.hpp"

#include <algorithm>
#include <map>

namespace ougauss {

int multi_order(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

namespace {

using TermKey = std::pair<std::vector<int>, std::vector<std::pair<int, int>>>;

DerivTermLedger merge(MultiIndex alpha, std::map<TermKey, std::int64_t>&& acc) {
  DerivTermLedger out;
  out.alpha = std::move(alpha);
  for (auto& [key, coeff] : acc) {
    if (coeff == 0) continue;
    out.terms.push_back(DerivTerm{key.first, key.second, coeff});
  }
  return out;
}

}  // namespace

DerivTermLedger differentiate_ledger(const DerivTermLedger& ledger, int l, int n) {
  std::map<TermKey, std::int64_t> acc;
  for (const auto& term : ledger.terms) {
    {  // new P_l factor on K
      auto p = term.p_indices;
      p.insert(std::upper_bound(p.begin(), p.end(), l), l);
      acc[{p, term.delta_pairs}] += term.coeff;
    }
    // derivative hits one of the P factors: P_j -> Delta_{l j}
    for (std::size_t k = 0; k < term.p_indices.size(); ++k) {
      if (k > 0 && term.p_indices[k] == term.p_indices[k - 1]) continue;  // same index, same result
      int j = term.p_indices[k];
      std::int64_t mult = std::count(term.p_indices.begin(), term.p_indices.end(), j);
      auto p = term.p_indices;
      p.erase(std::find(p.begin(), p.end(), j));
      auto d = term.delta_pairs;
      std::pair<int, int> pr{std::min(l, j), std::max(l, j)};
      d.insert(std::upper_bound(d.begin(), d.end(), pr), pr);
      acc[{p, d}] += term.coeff * mult;
    }
  }
  auto alpha = ledger.alpha;
  if (static_cast<int>(alpha.size()) < n) alpha.resize(n, 0);
  alpha[l] += 1;
  return merge(std::move(alpha), std::move(acc));
}

DerivTermLedger expand_dalpha(const MultiIndex& alpha, int n) {
  if (static_cast<int>(alpha.size()) != n)
    fail(ErrorCode::EmptyMultiindex, "alpha length must equal dimension");
  if (multi_order(alpha) < 1) fail(ErrorCode::EmptyMultiindex, "|alpha| must be >= 1");
  for (int a : alpha)
    if (a < 0) fail(ErrorCode::EmptyMultiindex, "alpha entries must be nonnegative");

  DerivTermLedger ledger;
  ledger.alpha = MultiIndex(n, 0);
  ledger.terms.push_back(DerivTerm{{}, {}, 1});  // D^0 K = K
  for (int j = 0; j < n; ++j)
    for (int rep = 0; rep < alpha[j]; ++rep) ledger = differentiate_ledger(ledger, j, n);
  return ledger;
}

LogValue eval_term(const DerivTerm& term, const MehlerParts& parts) {
  LogValue v = LogValue::from_double(static_cast<double>(term.coeff));
  for (int j : term.p_indices) v *= LogValue::from_double(parts.P[j]);
  for (const auto& [i, j] : term.delta_pairs) v *= LogValue::from_double((*parts.delta)(i, j));
  return v;
}

LogValue eval_dalpha_log(const OUModel& model, const DerivTermLedger& ledger,
                         const CovAtTime& cov, const Vec& x, const Vec& u) {
  MehlerParts parts = mehler_parts(model, cov, x, u);
  LogSum sum;
  for (const auto& term : ledger.terms) sum.add(eval_term(term, parts));
  return parts.logK * sum.value();
}

LogValue eval_dalpha_log(const OUModel& model, const DerivTermLedger& ledger, double t,
                         const Vec& x, const Vec& u) {
  return eval_dalpha_log(model, ledger, covariance_qt(model, t), x, u);
}

LogValue eval_terms_abs(const DerivTermLedger& ledger, const MehlerParts& parts) {
  LogSum sum;
  for (const auto& term : ledger.terms) sum.add(eval_term(term, parts).abs());
  return sum.value();
}

}  // namespace ougauss
