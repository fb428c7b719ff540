#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ougauss/mehler.hpp"

namespace ougauss {

using MultiIndex = std::vector<int>;  // length n, nonnegative entries

int multi_order(const MultiIndex& alpha);

// One product K_t * prod_j P_{p_j} * prod_(i,j) Delta_{ij}, with an integer
// coefficient. p_indices sorted; delta_pairs sorted with first <= second.
struct DerivTerm {
  std::vector<int> p_indices;
  std::vector<std::pair<int, int>> delta_pairs;
  std::int64_t coeff = 1;
};

struct DerivTermLedger {
  MultiIndex alpha;
  std::vector<DerivTerm> terms;
};

// Symbolic expansion of D^alpha_x K_t: repeated application of
// d/dx_l [K P...] = K P_l P... + K sum_k Delta_{l,p_k} P.../P_{p_k}.
// Purely combinatorial; independent of the model.
DerivTermLedger expand_dalpha(const MultiIndex& alpha, int n);

// Differentiates an existing ledger by d/dx_l. expand_dalpha is this folded
// over alpha; exposed for the structural induction test.
DerivTermLedger differentiate_ledger(const DerivTermLedger& ledger, int l, int n);

LogValue eval_term(const DerivTerm& term, const MehlerParts& parts);

// D^alpha_x K_t(x,u) = K_t * sum of terms, in sign/log form.
LogValue eval_dalpha_log(const OUModel& model, const DerivTermLedger& ledger,
                         const CovAtTime& cov, const Vec& x, const Vec& u);
LogValue eval_dalpha_log(const OUModel& model, const DerivTermLedger& ledger, double t,
                         const Vec& x, const Vec& u);

// sum over terms of |coeff| * prod(|P|) * prod(|Delta|) (no K factor).
LogValue eval_terms_abs(const DerivTermLedger& ledger, const MehlerParts& parts);

}  // namespace ougauss
