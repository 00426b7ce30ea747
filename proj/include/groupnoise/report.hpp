#pragma once

#include "groupnoise/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace groupnoise {

inline constexpr const char* kCsvHeader = "kind,group,rho,n,metric,value,stderr,reps,seed,wall_ms";

std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);
void write_json(std::ostream& os, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_csv(std::istream& is);
std::vector<ReportRow> read_json(std::istream& is);

/// Writes to `path` ("-" or empty for stdout) in "csv" or "json".
void emit_report(const std::vector<ReportRow>& rows, const std::string& path, const std::string& format);

}  // namespace groupnoise
