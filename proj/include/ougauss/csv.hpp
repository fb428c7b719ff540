#pragma once

#include <string>
#include <vector>

#include "ougauss/estimates.hpp"
#include "ougauss/weaktype.hpp"

namespace ougauss {

// All CSV output: fixed column order, header row, floats at 17 significant
// digits, '\n' line ends. Identical inputs give byte-identical files.
std::string format_double(double v);

void emit_csv(const EstimateReport& report, const std::string& path);
void emit_csv(const WeakTypeProfile& profile, const std::string& path);
void emit_csv(const CounterexampleReport& report, const std::string& path);

// free-form rows (CLI one-shot outputs)
void emit_rows_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const std::string& path);

// run manifest: configuration echo + library version, JSON
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& fields);

extern const char* kVersion;

}  // namespace ougauss
