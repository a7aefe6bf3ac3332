// shift-audit: command-line front end for audits, sweeps and the theory curve.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftaudit/audit.hpp"
#include "shiftaudit/config.hpp"
#include "shiftaudit/error.hpp"
#include "shiftaudit/report.hpp"
#include "shiftaudit/sweeps.hpp"
#include "shiftaudit/theory.hpp"

namespace fs = std::filesystem;
using namespace shiftaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::optional<std::uint64_t> seed_from_env() {
  const char* text = std::getenv("SHIFT_AUDIT_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (errno != 0 || *end != '\0' || text[0] == '-') {
    throw Error(ErrorCode::ConfigError, std::string("SHIFT_AUDIT_SEED is not an unsigned integer: ") + text);
  }
  return v;
}

ExperimentConfig load(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::ConfigError, "config file not found: " + path.string());
  return load_experiment_config(path, seed_from_env());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

fs::path prepare_output(const ExperimentConfig& cfg, const std::optional<fs::path>& override_dir) {
  const fs::path dir = override_dir ? *override_dir : cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

struct CommonOptions {
  fs::path config;
  std::optional<fs::path> out;
  std::optional<int> workers;
};

void apply_workers(ExperimentConfig& cfg, const CommonOptions& opts) {
  if (opts.workers) {
    cfg.audit.workers = *opts.workers;
    if (cfg.sweep) cfg.sweep->base.workers = *opts.workers;
  }
}

int cmd_audit(const CommonOptions& opts) {
  ExperimentConfig cfg = load(opts.config);
  apply_workers(cfg, opts);
  if (cfg.sweep) std::cerr << "note: [sweep] section ignored by 'audit'\n";
  const fs::path dir = prepare_output(cfg, opts.out);

  const AuditOutcome outcome = run_audit_with_baseline(cfg.audit);
  write_file(dir / "report.json", audit_report_json(cfg.audit, outcome.attack, &outcome.naive));
  std::ostringstream scores;
  write_scores_csv(scores, outcome.attack);
  write_file(dir / "scores.csv", scores.str());
  const std::string summary = audit_summary_text(cfg.audit, outcome.attack, &outcome.naive);
  write_file(dir / "summary.txt", summary);
  std::cout << summary;
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts) {
  ExperimentConfig cfg = load(opts.config);
  apply_workers(cfg, opts);
  if (!cfg.sweep) throw Error(ErrorCode::ConfigError, "config has no [sweep] section");
  const fs::path dir = prepare_output(cfg, opts.out);

  const SweepSpec& spec = *cfg.sweep;
  const std::vector<SweepRow> rows = run_sweep(spec);
  std::ostringstream csv;
  write_sweep_csv(csv, spec.axis, rows);
  write_file(dir / "summary.csv", csv.str());
  write_file(dir / "summary.json", sweep_summary_json(spec, rows));
  std::ostringstream jsonl;
  write_sweep_scores_jsonl(jsonl, spec.axis, rows);
  write_file(dir / "scores.jsonl", jsonl.str());
  std::cout << csv.str();

  int failed = 0;
  for (const auto& row : rows) {
    if (!row.ok) {
      ++failed;
      std::cerr << "warning: cell " << row.label << " failed: " << row.error << '\n';
    }
  }
  if (failed > 0) std::cerr << "warning: " << failed << " of " << rows.size() << " cells failed\n";
  return kExitOk;
}

int cmd_validate(const CommonOptions& opts) {
  const ExperimentConfig cfg = load(opts.config);
  std::cout << "ok: " << (cfg.sweep ? "sweep over " + std::string(to_string(cfg.sweep->axis)) + " with " +
                                          std::to_string(cfg.sweep->size()) + " cells"
                                    : std::string("audit"))
            << '\n';
  return kExitOk;
}

struct TheoryOptions {
  double epsilon = 0.001;
  std::int64_t n_train = 1000;
  double tau_min = 0.0;
  double tau_max = 4.0;
  int tau_points = 9;
  std::vector<double> taus;
  std::int64_t trials = 100000;
  int resamples = 100;
  std::uint64_t seed = 0;
  std::optional<fs::path> out;
};

int cmd_theory(const TheoryOptions& opts) {
  std::vector<double> grid = opts.taus;
  if (grid.empty()) {
    if (opts.tau_points == 1) {
      grid.push_back(opts.tau_min);
    } else {
      for (int i = 0; i < opts.tau_points; ++i) {
        grid.push_back(opts.tau_min + (opts.tau_max - opts.tau_min) * i / (opts.tau_points - 1));
      }
    }
  }
  const auto rows = theory_curve(opts.epsilon, opts.n_train, grid, opts.seed, opts.resamples);
  std::ostringstream csv;
  write_theory_csv(csv, rows);
  if (opts.out) {
    write_file(*opts.out, csv.str());
  } else {
    std::cout << csv.str();
  }

  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    TheoryParams params;
    params.tau = grid[i];
    params.epsilon = opts.epsilon;
    params.n_train = opts.n_train;
    const auto sim = simulate_theory_attack(params, QueryDist::D, opts.trials, derive_seed(opts.seed, "simulate", i));
    max_dev = std::max(max_dev, std::abs(sim.win_rate - sim.closed_form));
  }
  const double se = std::sqrt(0.25 / static_cast<double>(opts.trials));
  std::cerr << "closed form vs simulation: max deviation " << format_number(max_dev) << " over " << grid.size()
            << " tau values (" << format_number(max_dev / se) << " MC standard errors, " << opts.trials
            << " trials each)\n";
  return kExitOk;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::SchemaMismatch:
      case ErrorCode::ParseError:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box distribution-shift audits of trained models"};
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App* sub, bool runs) {
    sub->add_option("config", common.config, "experiment config file (INI)")->required();
    if (runs) {
      sub->add_option("--out", common.out, "output directory (overrides [output] dir)");
      sub->add_option("--workers", common.workers, "concurrent runs; 0 uses every hardware thread")
          ->check(CLI::NonNegativeNumber);
    }
  };
  auto* audit = app.add_subcommand("audit", "run one audit and write report.json, scores.csv, summary.txt");
  add_common(audit, true);
  auto* sweep = app.add_subcommand("sweep", "run a sweep and write summary.csv, summary.json, scores.jsonl");
  add_common(sweep, true);
  auto* validate = app.add_subcommand("validate-config", "check a config file without running it");
  add_common(validate, false);
  app.add_subcommand("config-reference", "print every accepted config key");

  TheoryOptions theory_opts;
  auto* theory = app.add_subcommand("theory", "closeness curve and closed-form check for the Gaussian model");
  theory->add_option("--epsilon", theory_opts.epsilon, "closeness radius")->check(CLI::PositiveNumber);
  theory->add_option("--n-train", theory_opts.n_train, "training-set size")->check(CLI::PositiveNumber);
  theory->add_option("--tau-min", theory_opts.tau_min, "first tau of the grid");
  theory->add_option("--tau-max", theory_opts.tau_max, "last tau of the grid");
  theory->add_option("--tau-points", theory_opts.tau_points, "grid size")->check(CLI::PositiveNumber);
  theory->add_option("--tau", theory_opts.taus, "explicit tau values (overrides the grid)")->delimiter(',');
  theory->add_option("--trials", theory_opts.trials, "simulated games per tau")->check(CLI::PositiveNumber);
  theory->add_option("--resamples", theory_opts.resamples, "training-set draws per curve row")
      ->check(CLI::Range(2, 1000000));
  theory->add_option("--seed", theory_opts.seed, "master seed");
  theory->add_option("--out", theory_opts.out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*audit) return guarded([&] { return cmd_audit(common); });
  if (*sweep) return guarded([&] { return cmd_sweep(common); });
  if (*validate) return guarded([&] { return cmd_validate(common); });
  if (*theory) return guarded([&] { return cmd_theory(theory_opts); });
  std::cout << config_reference();
  return kExitOk;
}
