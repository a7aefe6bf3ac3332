#include "shiftaudit/report.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "shiftaudit/stats.hpp"

namespace shiftaudit {

using Json = nlohmann::ordered_json;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json runs_json(const std::vector<RunDiagnostics>& runs) {
  Json out = Json::array();
  for (const auto& d : runs) {
    out.push_back({
        {"seed", d.seed},
        {"score", d.score},
        {"naive_score", d.naive_score},
        {"attack_train_accuracy", d.attack_train_accuracy},
        {"target_train_size", d.target_train_size},
        {"target_train_performance", d.target_train_performance},
        {"target_test_performance", d.target_test_performance},
        {"target_group0_performance", optional_number(d.target_group_performance[0])},
        {"target_group1_performance", optional_number(d.target_group_performance[1])},
        {"target_converged", d.target_converged},
        {"shadows_converged", d.shadows_converged},
    });
  }
  return out;
}

Json report_core(const AuditReport& r, bool with_runs) {
  Json out = {
      {"statistic", std::string(to_string(r.statistic))},
      {"percentile", r.percentile},
      {"threshold", r.threshold},
      {"tpr_at_percentile", r.tpr_at_percentile},
      {"auc_roc", r.auc_roc},
      {"control_scores", r.control_scores},
      {"shifted_scores", r.shifted_scores},
      {"verdicts", r.verdicts},
  };
  if (with_runs) {
    out["control_runs"] = runs_json(r.control_runs);
    out["shifted_runs"] = runs_json(r.shifted_runs);
  }
  return out;
}

Json config_json(const AuditConfig& cfg) {
  Json fractions = Json::array();
  for (double f : cfg.partition.fractions) fractions.push_back(f);
  return {
      {"statistic", std::string(to_string(cfg.statistic))},
      {"gap_orientation", std::string(to_string(cfg.gap_orientation))},
      {"learner", std::string(to_string(cfg.learner.algorithm()))},
      {"sample_size", cfg.sample_size},
      {"partition_fractions", fractions},
      {"stratify", cfg.partition.stratify},
      {"n_control_runs", cfg.n_control_runs},
      {"n_shifted_runs", cfg.n_shifted_runs},
      {"percentile", cfg.percentile},
      {"n_q", cfg.n_q},
      {"n_shadows", cfg.n_shadows},
      {"auditor_data_fraction", cfg.auditor_data_fraction},
      {"seed", cfg.seed},
      {"normative", cfg.normative ? cfg.normative->describe() : ""},
      {"alternative", cfg.alternative ? cfg.alternative->describe() : ""},
  };
}

}  // namespace

std::string audit_report_json(const AuditConfig& cfg, const AuditReport& attack, const AuditReport* naive) {
  Json out;
  out["schema_version"] = kReportSchemaVersion;
  out["config"] = config_json(cfg);
  out["audit"] = report_core(attack, true);
  if (naive != nullptr) out["naive_baseline"] = report_core(*naive, false);
  return out.dump(2) + "\n";
}

void write_scores_csv(std::ostream& out, const AuditReport& report) {
  out << "setting,run,score\n";
  for (std::size_t i = 0; i < report.control_scores.size(); ++i) {
    out << "control," << i << ',' << format_number(report.control_scores[i]) << '\n';
  }
  for (std::size_t i = 0; i < report.shifted_scores.size(); ++i) {
    out << "shifted," << i << ',' << format_number(report.shifted_scores[i]) << '\n';
  }
}

std::string audit_summary_text(const AuditConfig& cfg, const AuditReport& attack, const AuditReport* naive) {
  std::ostringstream os;
  const auto rejected = std::count(attack.verdicts.begin(), attack.verdicts.end(), true);
  os << "statistic: " << to_string(attack.statistic) << '\n';
  os << "learner: " << to_string(cfg.learner.algorithm()) << '\n';
  os << "control runs: " << attack.control_scores.size() << ", mean " << format_number(mean(attack.control_scores))
     << ", sd " << format_number(standard_deviation(attack.control_scores)) << '\n';
  os << "shifted runs: " << attack.shifted_scores.size() << ", mean " << format_number(mean(attack.shifted_scores))
     << ", sd " << format_number(standard_deviation(attack.shifted_scores)) << '\n';
  os << "threshold (p=" << format_number(attack.percentile) << "): " << format_number(attack.threshold) << '\n';
  os << "rejected: " << rejected << " of " << attack.verdicts.size() << '\n';
  os << "tpr: " << format_number(attack.tpr_at_percentile) << '\n';
  os << "auc: " << format_number(attack.auc_roc) << '\n';
  if (naive != nullptr) {
    os << "naive baseline tpr: " << format_number(naive->tpr_at_percentile) << '\n';
    os << "naive baseline auc: " << format_number(naive->auc_roc) << '\n';
  }
  return os.str();
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << to_string(axis)
      << ",status,control_mean,control_sd,shifted_mean,shifted_sd,auc,tpr,threshold,target_train,target_test,error\n";
  for (const auto& r : rows) {
    out << r.label << ',' << (r.ok ? "ok" : "error");
    if (r.ok) {
      for (double v : {r.control_mean, r.control_sd, r.shifted_mean, r.shifted_sd, r.auc, r.tpr, r.threshold,
                       r.target_train_mean, r.target_test_mean}) {
        out << ',' << format_number(v);
      }
      out << ",\n";
    } else {
      std::string message = r.error;
      for (char& c : message) {
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      }
      out << ",,,,,,,,,," << message << '\n';
    }
  }
}

std::string sweep_summary_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  Json out;
  out["schema_version"] = kReportSchemaVersion;
  out["axis"] = std::string(to_string(spec.axis));
  out["config"] = config_json(spec.base);
  Json cells = Json::array();
  for (const auto& r : rows) {
    Json cell = {{"value", r.label}, {"status", r.ok ? "ok" : "error"}};
    if (r.ok) {
      cell["control_mean"] = r.control_mean;
      cell["control_sd"] = r.control_sd;
      cell["shifted_mean"] = r.shifted_mean;
      cell["shifted_sd"] = r.shifted_sd;
      cell["auc"] = r.auc;
      cell["tpr"] = r.tpr;
      cell["threshold"] = r.threshold;
      cell["target_train"] = r.target_train_mean;
      cell["target_test"] = r.target_test_mean;
    } else {
      cell["error"] = r.error;
    }
    cells.push_back(std::move(cell));
  }
  out["cells"] = std::move(cells);
  return out.dump(2) + "\n";
}

void write_sweep_scores_jsonl(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    if (!r.ok) continue;
    const auto emit = [&](const char* setting, const std::vector<double>& scores) {
      for (std::size_t i = 0; i < scores.size(); ++i) {
        Json line = {{std::string(to_string(axis)), r.label}, {"setting", setting}, {"run", i}, {"score", scores[i]}};
        out << line.dump() << '\n';
      }
    };
    emit("control", r.control_scores);
    emit("shifted", r.shifted_scores);
  }
}

void write_theory_csv(std::ostream& out, const std::vector<TheoryCurveRow>& rows) {
  out << "tau,ft_d0,ft_d1,ft_d,fs_d0,fs_d1,fs_d,mc_stderr\n";
  for (const auto& r : rows) {
    out << format_number(r.tau) << ',' << format_number(r.ft_d0) << ',' << format_number(r.ft_d1) << ','
        << format_number(r.ft_d) << ',' << format_number(r.fs_d0) << ',' << format_number(r.fs_d1) << ','
        << format_number(r.fs_d) << ',' << format_number(r.mc_stderr) << '\n';
  }
}

}  // namespace shiftaudit
