#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shiftaudit/audit.hpp"
#include "shiftaudit/sweeps.hpp"
#include "shiftaudit/theory.hpp"

namespace shiftaudit {

inline constexpr int kReportSchemaVersion = 1;

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Full audit report plus the configuration echo, pretty-printed with a
/// trailing newline. Output depends only on its arguments.
std::string audit_report_json(const AuditConfig& cfg, const AuditReport& attack, const AuditReport* naive);

/// Columns setting,run,score.
void write_scores_csv(std::ostream& out, const AuditReport& report);

std::string audit_summary_text(const AuditConfig& cfg, const AuditReport& attack, const AuditReport* naive);

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);
std::string sweep_summary_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);
/// One JSON object per line: axis value, setting, run index, score.
void write_sweep_scores_jsonl(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

/// Columns tau,ft_d0,ft_d1,fs_d,mc_stderr.
void write_theory_csv(std::ostream& out, const std::vector<TheoryCurveRow>& rows);

}  // namespace shiftaudit
