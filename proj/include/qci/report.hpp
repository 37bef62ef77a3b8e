#pragma once

#include <string>
#include <vector>

#include "qci/geometry.hpp"
#include "qci/weyl.hpp"

namespace qci {

/// Report document (JSON) for a comparison.
std::string report_document(const ComparisonReport& report);

/// Data table: lambda,point,actual_re,actual_im,predicted_re,predicted_im,remainder_abs,truncation_bound.
std::string report_table(const ComparisonReport& report);

/// Writes <dir>/<id>.report and <dir>/<id>.csv; returns the report path.
std::string write_report(const ComparisonReport& report, const std::string& dir);

/// One row of the merged summary.
struct ReportSummary {
    std::string path, id, target, criterion;
    double beta = 0.0, ci_lo = 0.0, ci_hi = 0.0, threshold = 0.0, seconds = 0.0;
    std::size_t points = 0;
    bool pass = false;
};

ReportSummary read_report_summary(const std::string& path);

/// Summary table with one row per report, in the order given.
std::string summary_table(const std::vector<ReportSummary>& rows);

/// Writes the file, creating parent directories. Raises IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qci
