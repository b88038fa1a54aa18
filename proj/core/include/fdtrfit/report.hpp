#pragma once

#include <filesystem>
#include <string>

#include "fdtrfit/campaign.hpp"

namespace fdtrfit {

/// Writes trials.csv, summary.json, hist_<name>.csv and, when traces were
/// kept, trace_<algorithm>_<trial>.csv into `dir` (created if missing).
/// Everything written is a function of the report alone, so equal reports
/// give byte-identical files.
void export_report(const TrialReport& report, const std::filesystem::path& dir);

std::string trials_csv(const TrialReport& report);
std::string summary_json(const TrialReport& report);

}  // namespace fdtrfit
