#include <filesystem>
#include <fstream>

#include "ougauss/csv.hpp"
#include "support.hpp"

using namespace ougauss;
using namespace ougauss::testing;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("catalog covers the required bound families") {
  const std::vector<std::string> required = {
      "flow-growth-ds", "flow-growth-ds-inv", "flow-growth-expmb", "flow-growth-expmbt",
      "qt-determinant", "qt-inverse-norm", "qt-diff-inv-decay", "qt-diff-inv-sqrt-growth",
      "flow-displacement", "flow-velocity-formula", "flow-r-derivative", "flow-velocity-size",
      "flow-r-displacement",
      "kernel-small-t-upper", "kernel-small-t-lower", "kernel-large-t-upper",
      "kernel-large-t-lower",
      "p-factor-small-t", "p-factor-large-t", "delta-factor-decay",
      "riesz1-small-part-bound", "riesz2-small-part-bound",
      "kernel-tail-weight", "kernel-tail-moments",
      "kernel-tail-p1", "kernel-tail-p2", "kernel-tail-p3", "kernel-tail-delta",
      "kernel-tail-p-delta",
      "riesz1-tail-size", "riesz2-tail-size",
      "local-time-integral-a1", "local-time-integral-a4",
      "cz-size-1-a1", "cz-gradx-1-a1", "cz-gradu-1-a1",
      "cz-size-2-a1", "cz-gradx-2-a1", "cz-gradu-2-a1",
      "cz-size-1-a4", "cz-gradx-1-a4", "cz-gradu-1-a4",
      "cz-size-2-a4", "cz-gradx-2-a4", "cz-gradu-2-a4",
  };
  const auto& catalog = estimate_catalog();
  CHECK(catalog.size() == required.size());
  for (const auto& id : required) {
    bool found = false;
    for (const auto& d : catalog) found = found || d.id == id;
    CHECK_MESSAGE(found, "missing catalog entry ", id);
  }
}

TEST_CASE("unknown estimate ids are rejected") {
  OUModel m = scalar_standard();
  try {
    estimate_probe(m, "no-such-entry", 10, 1);
    FAIL("expected UnknownEstimate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownEstimate);
  }
}

TEST_CASE("displacement probe reproduces the scalar closed-form envelope") {
  // |x - D_t x| / (|t||x|) = |e^t - 1| / |t|, which spans [1 - 1/e, e - 1]
  // over 0 < |t| <= 1
  OUModel m = scalar_standard();
  EstimateReport r = estimate_probe(m, "flow-displacement", 4000, 7);
  CHECK(r.violations == 0);
  CHECK(r.fitted_upper <= std::exp(1.0) - 1.0 + 1e-9);
  CHECK(r.fitted_upper >= std::exp(1.0) - 1.0 - 0.05);
  CHECK(r.fitted_lower >= 1.0 - std::exp(-1.0) - 1e-9);
  CHECK(r.fitted_lower <= 1.0 - std::exp(-1.0) + 0.05);
}

TEST_CASE("determinant ratio at small t matches the closed form") {
  OUModel m = scalar_standard();
  CovAtTime c = covariance_qt(m, 0.01);
  double ratio = std::exp(c.Qt_logdet) / 0.01;
  CHECK(ratio == doctest::Approx((1.0 - std::exp(-0.02)) / 2.0 / 0.01).epsilon(1e-10));
}

TEST_CASE("cheap probes pass with zero violations on random models") {
  const std::vector<std::string> cheap = {
      "flow-growth-ds", "flow-growth-ds-inv", "flow-growth-expmb", "flow-growth-expmbt",
      "qt-determinant", "qt-inverse-norm", "qt-diff-inv-decay", "qt-diff-inv-sqrt-growth",
      "flow-displacement", "flow-velocity-formula", "flow-r-derivative", "flow-velocity-size",
      "flow-r-displacement", "kernel-small-t-upper", "kernel-small-t-lower",
      "kernel-large-t-upper", "kernel-large-t-lower", "p-factor-small-t", "p-factor-large-t",
      "delta-factor-decay"};
  for (int k = 0; k < 4; ++k) {
    OUModel m = random_model(1 + k % 3, 12000 + k);
    for (const auto& id : cheap) {
      EstimateReport r = estimate_probe(m, id, 400, 100 + k);
      CHECK_MESSAGE(r.violations == 0, id, " violated on model ", k);
      CHECK(std::isfinite(r.fitted_upper));
    }
  }
}

TEST_CASE("quadrature-heavy probes smoke-run clean") {
  OUModel m = random_model(2, 12100);
  for (const auto& id : {"riesz1-small-part-bound", "kernel-tail-weight", "kernel-tail-moments",
                         "kernel-tail-p2", "riesz1-tail-size", "local-time-integral-a1",
                         "cz-size-1-a1", "cz-gradx-1-a1", "cz-gradu-2-a4"}) {
    EstimateReport r = estimate_probe(m, id, 25, 3);
    CHECK_MESSAGE(r.violations == 0, id);
    CHECK(std::isfinite(r.fitted_upper));
    CHECK(r.fitted_upper > 0.0);
  }
}

TEST_CASE("t0 scan picks 0.25 on the standard model") {
  OUModel m = scalar_standard();
  CHECK(find_t0(m) == doctest::Approx(0.25));
  CHECK(std::exp(-0.25) > 0.75);  // the margin that selects it
  CHECK(std::exp(-0.30) < 0.75);
}

TEST_CASE("weak-type profile smoke: finite, deterministic, slope populated") {
  OUModel m = scalar_standard();
  WeakTypeConfig cfg;
  cfg.polar_s_points = 220;
  cfg.kernel.rel_tol = 1e-5;
  std::vector<double> etas = {4, 6, 8};
  WeakTypeProfile p1 = weak_type_profile(m, {1}, etas, WeakTypeMode::PolarGrid, 17, cfg);
  WeakTypeProfile p2 = weak_type_profile(m, {1}, etas, WeakTypeMode::PolarGrid, 17, cfg);
  REQUIRE(p1.quasinorm.size() == 3);
  for (double q : p1.quasinorm) CHECK(q > 0.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p1.quasinorm[i] == p2.quasinorm[i]);
  CHECK(p1.t0 == doctest::Approx(0.25));
  CHECK(std::isfinite(p1.fit_slope));
}

TEST_CASE("monte carlo mode runs in higher dimension and is seed-deterministic") {
  OUModel m = random_model(3, 12200);
  WeakTypeConfig cfg;
  cfg.mc_points = 4000;
  cfg.mc_strata = 8;
  cfg.kernel.rel_tol = 1e-4;
  std::vector<double> etas = {4, 6};
  WeakTypeProfile a = weak_type_profile(m, {1, 0, 0}, etas, WeakTypeMode::MonteCarlo, 5, cfg);
  WeakTypeProfile b = weak_type_profile(m, {1, 0, 0}, etas, WeakTypeMode::MonteCarlo, 5, cfg);
  REQUIRE(a.quasinorm.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.quasinorm[i] > 0.0);
    CHECK(a.quasinorm[i] == b.quasinorm[i]);
  }
  try {
    weak_type_profile(m, {1, 0, 0}, etas, WeakTypeMode::PolarGrid, 5, cfg);
    FAIL("expected GridBudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridBudgetExceeded);
  }
}

TEST_CASE("counterexample run on the standard model") {
  OUModel m = scalar_standard();
  CounterexampleConfig cfg;
  cfg.kernel.rel_tol = 1e-6;
  CounterexampleReport rep = counterexample_run(m, {3}, {6.0, 8.0, 12.0}, 11, cfg);
  CHECK(rep.t0 == doctest::Approx(0.25));
  CHECK(rep.floor_overall > 0.0);
  CHECK(rep.dominant_ok);
  for (double g : rep.geometry_const) CHECK(g > 0.0);
  CHECK(rep.geometry_band < 2.0);
  // x0 = e^{-t0} u0 in the scalar model
  CHECK(rep.x0_norm[0] == doctest::Approx(std::exp(-0.25) * 0.5 * 6.0).epsilon(1e-12));
  try {
    counterexample_run(m, {2}, {6.0}, 11, cfg);
    FAIL("expected EmptyMultiindex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMultiindex);
  }
}

TEST_CASE("csv emission is deterministic and carries the pinned schema") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "ougauss_csv_test";
  fs::create_directories(dir);

  OUModel m = scalar_standard();
  EstimateReport r = estimate_probe(m, "flow-displacement", 200, 42);
  std::string p1 = (dir / "est1.csv").string(), p2 = (dir / "est2.csv").string();
  emit_csv(r, p1);
  emit_csv(estimate_probe(m, "flow-displacement", 200, 42), p2);
  std::string a = slurp(p1), b = slurp(p2);
  CHECK(a == b);
  CHECK(a.rfind("estimate_id,n_samples,fitted_lower,fitted_upper,violations\n", 0) == 0);

  WeakTypeConfig wcfg;
  wcfg.polar_s_points = 80;
  wcfg.kernel.rel_tol = 1e-4;
  WeakTypeProfile prof = weak_type_profile(m, {1}, {4, 6}, WeakTypeMode::PolarGrid, 9, wcfg);
  std::string w1 = (dir / "w1.csv").string(), w2 = (dir / "w2.csv").string();
  emit_csv(prof, w1);
  emit_csv(weak_type_profile(m, {1}, {4, 6}, WeakTypeMode::PolarGrid, 9, wcfg), w2);
  CHECK(slurp(w1) == slurp(w2));
  CHECK(slurp(w1).rfind("eta,x0_norm,quasinorm,lambda_at_sup,shell_truncation_rel\n", 0) == 0);
  CHECK(slurp(w1).find("fit_slope,") != std::string::npos);

  write_manifest((dir / "m.json").string(), "test", {{"seed", "9"}});
  CHECK(slurp((dir / "m.json").string()).find("\"command\": \"test\"") != std::string::npos);
  fs::remove_all(dir);
}
