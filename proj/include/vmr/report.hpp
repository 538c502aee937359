#pragma once

#include "vmr/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace vmr {

/// "R1@0.5 R1@0.7 mAP@0.5 mAP@0.75 mAP-avg" values, two decimals, single spaces.
std::string format_headline_row(const EvalReport& report);

/// Fixed-column table: the five headline metrics, then average mAP by gt
/// length bucket (long, medium, short).
void write_report_table(const EvalReport& report, const std::string& label, std::ostream& out);

/// Header plus one row. Empty buckets are left blank.
void write_report_csv(const EvalReport& report, const std::string& label, std::ostream& out);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

}  // namespace vmr
