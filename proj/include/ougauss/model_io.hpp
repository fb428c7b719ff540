#pragma once

#include <string>

#include "ougauss/model.hpp"
#include "ougauss/polynomial.hpp"

namespace ougauss {

// Model file schema (JSON):
//   { "n": 2,
//     "Q": [row-major n*n numbers],
//     "B": [row-major n*n numbers],
//     "tolerances": { "pd_rel": ..., "hurwitz": ..., "lyapunov_rel": ... } }  (optional)
OUModel load_model(const std::string& path);

// Polynomial file schema (JSON):
//   { "n": 1, "terms": [ { "alpha": [2], "c": 1.0 }, ... ] }
Polynomial load_polynomial(const std::string& path);

}  // namespace ougauss
