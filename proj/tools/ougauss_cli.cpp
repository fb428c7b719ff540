#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ougauss/csv.hpp"
#include "ougauss/geometry.hpp"
#include "ougauss/mehler.hpp"
#include "ougauss/model_io.hpp"

namespace fs = std::filesystem;
using namespace ougauss;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stod(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

MultiIndex parse_alpha(const std::string& s, int n) {
  auto vals = parse_list(s);
  if (static_cast<int>(vals.size()) != n)
    fail(ErrorCode::EmptyMultiindex, "--alpha needs exactly n comma-separated entries");
  MultiIndex a(n);
  for (int i = 0; i < n; ++i) a[i] = static_cast<int>(vals[i]);
  return a;
}

Vec parse_vec(const std::string& s, int n) {
  auto vals = parse_list(s);
  if (static_cast<int>(vals.size()) != n)
    fail(ErrorCode::IoFailure, "vector needs exactly n comma-separated entries");
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = vals[i];
  return v;
}

int run_verify(const OUModel& model, const std::string& suite, std::uint64_t seed,
               const std::string& out_dir, long samples) {
  fs::create_directories(out_dir);
  std::vector<std::string> ids;
  if (suite == "all") {
    for (const auto& d : estimate_catalog()) ids.push_back(d.id);
  } else {
    ids.push_back(suite);
  }
  long total_violations = 0;
  std::vector<std::pair<std::string, std::string>> manifest_fields;
  manifest_fields.emplace_back("seed", std::to_string(seed));
  for (const auto& id : ids) {
    EstimateReport rep = estimate_probe(model, id, samples, seed);
    emit_csv(rep, out_dir + "/estimate_" + id + ".csv");
    total_violations += rep.violations;
    std::cout << (rep.violations == 0 ? "[pass] " : "[FAIL] ") << id
              << "  lower=" << format_double(rep.fitted_lower)
              << "  upper=" << format_double(rep.fitted_upper)
              << "  violations=" << rep.violations << "\n";
    manifest_fields.emplace_back(id, rep.notes);
  }
  write_manifest(out_dir + "/manifest.json", "verify", manifest_fields);
  return total_violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for Ornstein-Uhlenbeck kernel calculus"};
  app.require_subcommand(1);

  std::string model_path;
  app.add_option("--model", model_path, "model JSON file")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "run bound-probe suites");
  std::string suite = "all", out_dir = "out";
  std::uint64_t seed = 1;
  long samples = 0;
  verify->add_option("--suite", suite, "suite id or 'all'");
  verify->add_option("--seed", seed, "rng seed");
  verify->add_option("--out", out_dir, "output directory");
  verify->add_option("--samples", samples, "override sample count");

  // weaktype
  auto* weak = app.add_subcommand("weaktype", "level-set profile of a Riesz kernel");
  std::string alpha_str, etas_str = "4,5,6,7,8,9,10,11,12", mode_str = "polar";
  weak->add_option("--alpha", alpha_str, "multiindex a1,...,an")->required();
  weak->add_option("--etas", etas_str, "comma list of eta values");
  weak->add_option("--mode", mode_str, "polar|mc");
  weak->add_option("--seed", seed, "rng seed");
  weak->add_option("--out", out_dir, "output directory");

  // counterexample
  auto* ce = app.add_subcommand("counterexample", "divergence audit for |alpha| > 2");
  std::string ce_etas = "6,8,10,12";
  ce->add_option("--alpha", alpha_str, "multiindex a1,...,an")->required();
  ce->add_option("--etas", ce_etas, "comma list of eta values");
  ce->add_option("--seed", seed, "rng seed");
  ce->add_option("--out", out_dir, "output directory");

  // kernel-eval
  auto* keval = app.add_subcommand("kernel-eval", "evaluate K_t and D^alpha K_t at a point");
  std::string x_str, u_str;
  double t = 1.0;
  keval->add_option("--t", t, "time")->required();
  keval->add_option("--x", x_str, "point x")->required();
  keval->add_option("--u", u_str, "point u")->required();
  keval->add_option("--alpha", alpha_str, "multiindex (optional)");
  keval->add_option("--out", out_dir, "output directory");

  // semigroup-eval
  auto* seval = app.add_subcommand("semigroup-eval", "H_t f(x), L f(x), gamma_inf mean");
  std::string poly_path;
  seval->add_option("--t", t, "time")->required();
  seval->add_option("--x", x_str, "point x")->required();
  seval->add_option("--poly", poly_path, "polynomial JSON file")->required();
  seval->add_option("--out", out_dir, "output directory");

  // riesz-kernel
  auto* rk = app.add_subcommand("riesz-kernel", "Riesz kernel value and split parts");
  double split = 1.0;
  rk->add_option("--alpha", alpha_str, "multiindex")->required();
  rk->add_option("--x", x_str, "point x")->required();
  rk->add_option("--u", u_str, "point u")->required();
  rk->add_option("--split", split, "split time");
  rk->add_option("--out", out_dir, "output directory");

  // riesz-apply
  auto* ra = app.add_subcommand("riesz-apply", "apply a Riesz transform to a polynomial");
  std::string grid_str = "-2:2:9";
  ra->add_option("--alpha", alpha_str, "multiindex")->required();
  ra->add_option("--poly", poly_path, "polynomial JSON file")->required();
  ra->add_option("--x-grid", grid_str, "a:b:count grid along the first axis");
  ra->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    OUModel model = load_model(model_path);

    if (verify->parsed()) return run_verify(model, suite, seed, out_dir, samples);

    if (weak->parsed()) {
      MultiIndex alpha = parse_alpha(alpha_str, model.n);
      WeakTypeMode mode = mode_str == "mc" ? WeakTypeMode::MonteCarlo : WeakTypeMode::PolarGrid;
      WeakTypeConfig cfg;
      if (mode == WeakTypeMode::MonteCarlo) cfg.mc_points = 200000;
      WeakTypeProfile prof = weak_type_profile(model, alpha, parse_list(etas_str), mode, seed, cfg);
      fs::create_directories(out_dir);
      emit_csv(prof, out_dir + "/weaktype.csv");
      write_manifest(out_dir + "/manifest.json", "weaktype",
                     {{"alpha", alpha_str},
                      {"etas", etas_str},
                      {"mode", mode_str},
                      {"seed", std::to_string(seed)},
                      {"t0", format_double(prof.t0)}});
      int order = multi_order(alpha);
      double center = order <= 2 ? 0.0 : order - 2.0;
      bool ok = std::abs(prof.fit_slope - center) <= 0.3;
      std::cout << (ok ? "[pass] " : "[FAIL] ") << "fit_slope=" << format_double(prof.fit_slope)
                << " expected " << format_double(center) << " +/- 0.3\n";
      return ok ? 0 : 1;
    }

    if (ce->parsed()) {
      MultiIndex alpha = parse_alpha(alpha_str, model.n);
      CounterexampleReport rep = counterexample_run(model, alpha, parse_list(ce_etas), seed);
      fs::create_directories(out_dir);
      emit_csv(rep, out_dir + "/counterexample.csv");
      write_manifest(out_dir + "/manifest.json", "counterexample",
                     {{"alpha", alpha_str},
                      {"etas", ce_etas},
                      {"seed", std::to_string(seed)},
                      {"t0", format_double(rep.t0)}});
      bool ok = rep.floor_overall > 0.0 && rep.dominant_ok && rep.geometry_band < 2.0;
      std::cout << (ok ? "[pass] " : "[FAIL] ") << "floor=" << format_double(rep.floor_overall)
                << " dominant_ok=" << rep.dominant_ok
                << " geometry_band=" << format_double(rep.geometry_band) << "\n";
      return ok ? 0 : 1;
    }

    if (keval->parsed()) {
      Vec x = parse_vec(x_str, model.n), u = parse_vec(u_str, model.n);
      CovAtTime cov = covariance_qt(model, t);
      LogValue K = log_mehler(model, cov, x, u);
      std::vector<std::string> header = {"t", "quantity", "sign", "logmag", "linear"};
      std::vector<std::vector<std::string>> rows;
      rows.push_back({format_double(t), "K_t", std::to_string(K.sign), format_double(K.logmag),
                      format_double(K.to_double())});
      if (!alpha_str.empty()) {
        MultiIndex alpha = parse_alpha(alpha_str, model.n);
        DerivTermLedger ledger = expand_dalpha(alpha, model.n);
        LogValue d = eval_dalpha_log(model, ledger, cov, x, u);
        rows.push_back({format_double(t), "Dalpha_K_t", std::to_string(d.sign),
                        format_double(d.logmag), format_double(d.to_double())});
      }
      fs::create_directories(out_dir);
      emit_rows_csv(header, rows, out_dir + "/kernel_eval.csv");
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
        std::cout << "\n";
      }
      return 0;
    }

    if (seval->parsed()) {
      Vec x = parse_vec(x_str, model.n);
      TestFunction f = TestFunction::from_poly(load_polynomial(poly_path));
      double ht = apply_semigroup(model, t, f, x);
      double lf = generator_apply(model, f, x);
      double mean = mean_under_gamma_inf(model, f);
      std::vector<std::string> header = {"t", "H_t_f", "L_f", "gamma_inf_mean"};
      std::vector<std::vector<std::string>> rows = {
          {format_double(t), format_double(ht), format_double(lf), format_double(mean)}};
      fs::create_directories(out_dir);
      emit_rows_csv(header, rows, out_dir + "/semigroup_eval.csv");
      std::cout << header[0] << "," << header[1] << "," << header[2] << "," << header[3] << "\n"
                << rows[0][0] << "," << rows[0][1] << "," << rows[0][2] << "," << rows[0][3]
                << "\n";
      return 0;
    }

    if (rk->parsed()) {
      MultiIndex alpha = parse_alpha(alpha_str, model.n);
      Vec x = parse_vec(x_str, model.n), u = parse_vec(u_str, model.n);
      RieszKernelConfig cfg;
      cfg.split_time = split;
      RieszKernelValue v = riesz_kernel_parts(model, alpha, x, u, cfg);
      std::vector<std::string> header = {"part", "sign", "logmag", "linear"};
      auto row_of = [](const char* name, const LogValue& lv) {
        return std::vector<std::string>{name, std::to_string(lv.sign), format_double(lv.logmag),
                                        format_double(lv.to_double())};
      };
      std::vector<std::vector<std::string>> rows = {row_of("whole", v.whole),
                                                    row_of("small_t", v.part_small),
                                                    row_of("large_t", v.part_large)};
      fs::create_directories(out_dir);
      emit_rows_csv(header, rows, out_dir + "/riesz_kernel.csv");
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
        std::cout << "\n";
      }
      return 0;
    }

    if (ra->parsed()) {
      MultiIndex alpha = parse_alpha(alpha_str, model.n);
      TestFunction f = TestFunction::from_poly(load_polynomial(poly_path));
      // grid format a:b:count
      double a = 0, b = 0;
      int count = 0;
      {
        auto first = grid_str.find(':');
        auto second = grid_str.find(':', first + 1);
        a = std::stod(grid_str.substr(0, first));
        b = std::stod(grid_str.substr(first + 1, second - first - 1));
        count = std::stoi(grid_str.substr(second + 1));
      }
      std::vector<std::string> header = {"x1", "spectral_value"};
      std::vector<std::vector<std::string>> rows;
      for (int i = 0; i < count; ++i) {
        Vec x = Vec::Zero(model.n);
        x[0] = a + (b - a) * (count == 1 ? 0.5 : static_cast<double>(i) / (count - 1));
        RieszApplyResult res = apply_riesz(model, alpha, f, x);
        rows.push_back({format_double(x[0]), format_double(res.spectral_value)});
      }
      fs::create_directories(out_dir);
      emit_rows_csv(header, rows, out_dir + "/riesz_apply.csv");
      for (const auto& r : rows) std::cout << r[0] << "," << r[1] << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
