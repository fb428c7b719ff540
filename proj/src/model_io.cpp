#include "ougauss/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace ougauss {

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoFailure, std::string("JSON parse error: ") + e.what());
  }
  return j;
}

Mat read_matrix(const nlohmann::json& j, const std::string& key, int n) {
  if (!j.contains(key)) fail(ErrorCode::IoFailure, "missing field '" + key + "'");
  auto arr = j.at(key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != n * n)
    fail(ErrorCode::IoFailure, "'" + key + "' must be a flat row-major array of n*n numbers");
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) M(i, k) = arr.at(i * n + k).get<double>();
  return M;
}

}  // namespace

OUModel load_model(const std::string& path) {
  nlohmann::json j = load_json(path);
  if (!j.contains("n")) fail(ErrorCode::IoFailure, "missing field 'n'");
  int n = j.at("n").get<int>();
  if (n < 1 || n > 64) fail(ErrorCode::IoFailure, "n out of range");
  Mat Q = read_matrix(j, "Q", n);
  Mat B = read_matrix(j, "B", n);
  Tolerances tol;
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("pd_rel")) tol.pd_rel = t.at("pd_rel").get<double>();
    if (t.contains("hurwitz")) tol.hurwitz = t.at("hurwitz").get<double>();
    if (t.contains("lyapunov_rel")) tol.lyapunov_rel = t.at("lyapunov_rel").get<double>();
  }
  return build_model(Q, B, tol);
}

Polynomial load_polynomial(const std::string& path) {
  nlohmann::json j = load_json(path);
  int n = j.at("n").get<int>();
  Polynomial p(n);
  for (const auto& term : j.at("terms")) {
    std::vector<int> alpha = term.at("alpha").get<std::vector<int>>();
    if (static_cast<int>(alpha.size()) != n)
      fail(ErrorCode::IoFailure, "term alpha length must equal n");
    p.add_term(alpha, term.at("c").get<double>());
  }
  return p;
}

}  // namespace ougauss
