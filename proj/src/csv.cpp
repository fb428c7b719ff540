#include "ougauss/csv.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace ougauss {

const char* kVersion = "ougauss 0.1.0";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void emit_csv(const EstimateReport& r, const std::string& path) {
  auto out = open_out(path);
  out << "estimate_id,n_samples,fitted_lower,fitted_upper,violations\n";
  out << r.estimate_id << ',' << r.n_samples << ',' << format_double(r.fitted_lower) << ','
      << format_double(r.fitted_upper) << ',' << r.violations << '\n';
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path);
}

void emit_csv(const WeakTypeProfile& p, const std::string& path) {
  auto out = open_out(path);
  out << "eta,x0_norm,quasinorm,lambda_at_sup,shell_truncation_rel\n";
  for (std::size_t i = 0; i < p.eta_grid.size(); ++i) {
    out << format_double(p.eta_grid[i]) << ',' << format_double(p.x0_norm[i]) << ','
        << format_double(p.quasinorm[i]) << ',' << format_double(p.lambda_at_sup[i]) << ','
        << format_double(p.shell_truncation_rel) << '\n';
  }
  out << "fit_slope," << format_double(p.fit_slope) << ",,,\n";
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path);
}

void emit_csv(const CounterexampleReport& r, const std::string& path) {
  auto out = open_out(path);
  out << "eta,x0_norm,floor_min,dominant_ratio,geometry_const\n";
  for (std::size_t i = 0; i < r.eta_grid.size(); ++i) {
    out << format_double(r.eta_grid[i]) << ',' << format_double(r.x0_norm[i]) << ','
        << format_double(r.floor_min[i]) << ',' << format_double(r.dominant_ratio[i]) << ','
        << format_double(r.geometry_const[i]) << '\n';
  }
  out << "t0," << format_double(r.t0) << ",floor_overall," << format_double(r.floor_overall)
      << ',' << format_double(r.geometry_band) << '\n';
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path);
}

void emit_rows_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const std::string& path) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path);
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& fields) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = command;
  for (const auto& [k, v] : fields) j[k] = v;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoFailure, "write failed: " + path);
}

}  // namespace ougauss
