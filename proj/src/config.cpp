#include "shiftaudit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "shiftaudit/error.hpp"

namespace shiftaudit {

namespace {

namespace pt = boost::property_tree;

struct KeyDoc {
  std::string_view key;
  std::string_view fallback;  ///< "" means required
  std::string_view help;
};

struct SectionDoc {
  std::string_view name;
  std::string_view help;
  std::vector<KeyDoc> keys;
};

const std::vector<SectionDoc>& section_docs() {
  static const std::vector<SectionDoc> docs = {
      {"audit",
       "Audit configuration.",
       {
           {"statistic", "inter_group_gap", "inter_group_gap or overall_accuracy"},
           {"gap_orientation", "performance", "performance, learned or absolute"},
           {"normative", "", "name of the [dist.<name>] section for the normative distribution"},
           {"alternative", "", "name of the [dist.<name>] section for the alternative (omit for sweeps over alpha or beta)"},
           {"sample_size", "5000", "normative draws per run, split five ways"},
           {"fractions", "0.2,0.2,0.2,0.2,0.2", "target-train, shadow-train, attack-train, model-test, attack-test shares"},
           {"stratify", "true", "stratify the split by label (classification only)"},
           {"n_control_runs", "50", "control runs (>= 10)"},
           {"n_shifted_runs", "50", "shifted runs"},
           {"percentile", "0.9", "threshold percentile of the control scores, in (0, 1)"},
           {"n_q", "50", "query points per attack bundle"},
           {"n_shadows", "1", "shadow models per run"},
           {"auditor_data_fraction", "1", "share of shadow-train and attack-train rows used"},
           {"seed", "0", "master seed; SHIFT_AUDIT_SEED overrides it"},
           {"workers", "1", "concurrent runs; 0 uses every hardware thread"},
       }},
      {"learner",
       "Learning algorithm for target, shadow and audited models. Only the keys of the chosen algorithm are accepted.",
       {
           {"algorithm", "dt", "dt, logit, gnb, rf, gbm, mlp or const"},
           {"max_depth", "5 (dt), 0 (rf), 3 (gbm)", "tree depth; 0 grows rf trees until pure"},
           {"min_samples_split", "2", "dt: smallest node that may split"},
           {"min_samples_leaf", "1", "dt, rf: smallest leaf"},
           {"l2", "1e-4", "logit, mlp: L2 penalty"},
           {"tolerance", "1e-6 (logit), 1e-4 (mlp)", "logit: gradient max-norm; mlp: loss improvement"},
           {"max_iterations", "200", "logit: Newton iterations"},
           {"var_smoothing", "1e-9", "gnb: variance floor relative to the largest feature variance"},
           {"n_estimators", "50", "rf: trees"},
           {"max_features", "0", "rf: features per split; 0 means floor(sqrt(d)) or d for regression"},
           {"n_rounds", "100", "gbm: boosting rounds"},
           {"learning_rate", "0.1", "gbm: shrinkage"},
           {"hidden", "32", "mlp: hidden units"},
           {"epochs", "100", "mlp: epochs"},
           {"batch_size", "32", "mlp: minibatch size"},
           {"step_size", "1e-3", "mlp: Adam step size"},
           {"n_iter_no_change", "10", "mlp: epochs without improvement before stopping"},
           {"value", "1", "const: the fixed prediction (a class label or regression value)"},
       }},
      {"learner.<algorithm>", "Hyperparameters used for <algorithm> on a learner sweep; same keys as [learner] minus algorithm.", {}},
      {"dist.<name> kind=gaussian_group",
       "One-dimensional two-group Gaussian family: X | y, z ~ N(center_z +- separation_z + offset, sd_z^2).",
       {
           {"kind", "", "gaussian_group"},
           {"group_mix", "0.5", "probability of group 1"},
           {"tau", "0", "shorthand for center1"},
           {"center0", "0", "group-0 center"},
           {"center1", "tau", "group-1 center"},
           {"separation0", "1", "group-0 half distance between class means"},
           {"separation1", "1", "group-1 half distance between class means"},
           {"sd0", "1", "group-0 standard deviation"},
           {"sd1", "1", "group-1 standard deviation"},
           {"offset", "0", "shift applied to both groups"},
       }},
      {"dist.<name> kind=latent_linear",
       "X ~ N(mean, sd^2 I); label 1[w.x + b + noise > 0] or the score itself for regression.",
       {
           {"kind", "", "latent_linear"},
           {"dim", "", "feature count"},
           {"mean", "0", "one value or dim comma-separated values"},
           {"sd", "1", "feature standard deviation"},
           {"weights", "", "dim comma-separated values"},
           {"bias", "0", "score offset"},
           {"noise_sd", "0", "score noise"},
           {"group_mix", "0", "probability of group 1 (independent of X and Y)"},
           {"task", "classification", "classification or regression"},
       }},
      {"dist.<name> kind=mixture",
       "weight * first + (1 - weight) * second.",
       {
           {"kind", "", "mixture"},
           {"weight", "", "alpha in [0, 1]"},
           {"first", "", "distribution name"},
           {"second", "", "distribution name"},
       }},
      {"dist.<name> kind=underrep",
       "beta * group0 + (1 - beta) * group1.",
       {
           {"kind", "", "underrep"},
           {"beta", "", "in [0.5, 1]"},
           {"group0", "", "distribution name"},
           {"group1", "", "distribution name"},
       }},
      {"dist.<name> kind=csv",
       "Finite pool loaded from a CSV file, sampled without replacement.",
       {
           {"kind", "", "csv"},
           {"path", "", "file path, relative to the config file"},
           {"label_col", "", "label column name"},
           {"group_col", "", "group column name (optional)"},
           {"task", "classification", "classification or regression"},
       }},
      {"dist.<name> kind=reserve",
       "A fixed random slice of a csv pool, or what remains after removing it.",
       {
           {"kind", "", "reserve"},
           {"source", "", "name of a csv distribution"},
           {"n_reserved", "", "rows in the reserved slice"},
           {"part", "", "reserved or remainder"},
           {"seed", "0", "slice seed"},
       }},
      {"sweep",
       "Optional campaign over one axis; each value runs a full audit.",
       {
           {"axis", "", "alpha, beta, learner or data_fraction"},
           {"grid", "", "comma-separated values (alpha, beta, data_fraction)"},
           {"learners", "", "comma-separated algorithms (learner axis)"},
           {"first", "", "alpha: base pool; beta: group-0 distribution"},
           {"second", "", "alpha: alternative pool; beta: group-1 distribution"},
       }},
      {"output", "Output location.", {{"dir", "shift-audit-out", "directory for reports"}}},
  };
  return docs;
}

const SectionDoc& doc_for(std::string_view name) {
  for (const auto& d : section_docs()) {
    if (d.name == name) return d;
  }
  throw Error(ErrorCode::ConfigError, "no documentation for section " + std::string(name));
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "[" + where + "] " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// A config section whose keys are checked against an allow-list.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree, std::vector<std::string_view> allowed)
      : name_(std::move(name)), tree_(tree) {
    if (tree_ == nullptr) return;
    for (const auto& [key, value] : *tree_) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        config_error(name_, "unknown key '" + key + "'");
      }
    }
  }

  bool has(std::string_view key) const {
    return tree_ != nullptr && tree_->find(std::string(key)) != tree_->not_found();
  }

  std::string text(std::string_view key) const {
    if (!has(key)) config_error(name_, "missing key '" + std::string(key) + "'");
    return trim(tree_->get<std::string>(std::string(key)));
  }
  std::string text(std::string_view key, std::string fallback) const { return has(key) ? text(key) : fallback; }

  double real(std::string_view key) const { return parse_real(key, text(key)); }
  double real(std::string_view key, double fallback) const { return has(key) ? real(key) : fallback; }

  long long integer(std::string_view key) const {
    const std::string t = text(key);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      config_error(name_, "key '" + std::string(key) + "' expects an integer, got '" + t + "'");
    }
    return v;
  }
  long long integer(std::string_view key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string t = text(key);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    config_error(name_, "key '" + std::string(key) + "' expects true or false, got '" + t + "'");
  }

  std::vector<double> reals(std::string_view key) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
    return out;
  }

  const std::string& name() const { return name_; }

 private:
  double parse_real(std::string_view key, const std::string& t) const {
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
      config_error(name_, "key '" + std::string(key) + "' expects a number, got '" + t + "'");
    }
    return v;
  }

  std::string name_;
  const pt::ptree* tree_;
};

// Section names contain dots, so they cannot go through ptree path lookup.
const pt::ptree* find_section(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

std::vector<std::string_view> keys_of(std::string_view doc_name) {
  std::vector<std::string_view> out;
  for (const auto& k : doc_for(doc_name).keys) out.push_back(k.key);
  return out;
}

// ---------------------------------------------------------------------------

LearnerSpec parse_learner(const std::string& name, const pt::ptree* tree, std::optional<Algorithm> fixed) {
  std::vector<std::string_view> all = keys_of("learner");
  if (fixed) all.erase(std::remove(all.begin(), all.end(), std::string_view("algorithm")), all.end());
  const Section probe(name, tree, all);
  Algorithm algorithm = Algorithm::DecisionTree;
  try {
    algorithm = fixed ? *fixed : parse_algorithm(probe.text("algorithm", "dt"));
  } catch (const Error& e) {
    config_error(name, e.what());
  }
  if (algorithm == Algorithm::Svm) config_error(name, "svm is not supported");

  LearnerSpec spec = LearnerSpec::defaults(algorithm);
  std::vector<std::string_view> allowed;
  if (!fixed) allowed.push_back("algorithm");
  const auto as_int = [&](std::string_view key, int fallback) {
    return static_cast<int>(probe.integer(key, fallback));
  };
  switch (algorithm) {
    case Algorithm::DecisionTree: {
      auto& p = std::get<TreeParams>(spec.params);
      allowed.insert(allowed.end(), {"max_depth", "min_samples_split", "min_samples_leaf"});
      p.max_depth = as_int("max_depth", p.max_depth);
      p.min_samples_split = as_int("min_samples_split", p.min_samples_split);
      p.min_samples_leaf = as_int("min_samples_leaf", p.min_samples_leaf);
      break;
    }
    case Algorithm::Logit: {
      auto& p = std::get<LogitParams>(spec.params);
      allowed.insert(allowed.end(), {"l2", "tolerance", "max_iterations"});
      p.l2 = probe.real("l2", p.l2);
      p.tolerance = probe.real("tolerance", p.tolerance);
      p.max_iterations = as_int("max_iterations", p.max_iterations);
      break;
    }
    case Algorithm::GaussianNB: {
      auto& p = std::get<GaussianNBParams>(spec.params);
      allowed.push_back("var_smoothing");
      p.var_smoothing = probe.real("var_smoothing", p.var_smoothing);
      break;
    }
    case Algorithm::RandomForest: {
      auto& p = std::get<ForestParams>(spec.params);
      allowed.insert(allowed.end(), {"n_estimators", "max_depth", "max_features", "min_samples_leaf"});
      p.n_estimators = as_int("n_estimators", p.n_estimators);
      p.max_depth = as_int("max_depth", p.max_depth);
      p.max_features = as_int("max_features", p.max_features);
      p.min_samples_leaf = as_int("min_samples_leaf", p.min_samples_leaf);
      break;
    }
    case Algorithm::GradientBoosting: {
      auto& p = std::get<BoostingParams>(spec.params);
      allowed.insert(allowed.end(), {"n_rounds", "max_depth", "learning_rate"});
      p.n_rounds = as_int("n_rounds", p.n_rounds);
      p.max_depth = as_int("max_depth", p.max_depth);
      p.learning_rate = probe.real("learning_rate", p.learning_rate);
      break;
    }
    case Algorithm::Mlp: {
      auto& p = std::get<MlpParams>(spec.params);
      allowed.insert(allowed.end(), {"hidden", "epochs", "batch_size", "step_size", "l2", "tolerance", "n_iter_no_change"});
      p.hidden = as_int("hidden", p.hidden);
      p.epochs = as_int("epochs", p.epochs);
      p.batch_size = as_int("batch_size", p.batch_size);
      p.step_size = probe.real("step_size", p.step_size);
      p.l2 = probe.real("l2", p.l2);
      p.tolerance = probe.real("tolerance", p.tolerance);
      p.n_iter_no_change = as_int("n_iter_no_change", p.n_iter_no_change);
      break;
    }
    case Algorithm::Constant: {
      auto& p = std::get<ConstantParams>(spec.params);
      allowed.push_back("value");
      p.value = probe.real("value", p.value);
      break;
    }
    case Algorithm::Svm:
      break;
  }
  // Re-check against the chosen algorithm's own keys.
  const Section strict(name, tree, allowed);
  try {
    spec.validate();
  } catch (const Error& e) {
    config_error(name, e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------

class DistributionBuilder {
 public:
  DistributionBuilder(const pt::ptree& root, std::filesystem::path base_dir)
      : root_(root), base_dir_(std::move(base_dir)) {}

  DistributionPtr get(const std::string& name) {
    if (auto it = built_.find(name); it != built_.end()) return it->second;
    if (building_.count(name) != 0) config_error("dist." + name, "distribution refers to itself");
    const pt::ptree* tree = find_section(root_, "dist." + name);
    if (!tree) throw Error(ErrorCode::ConfigError, "unknown distribution '" + name + "' (no [dist." + name + "] section)");
    building_.insert(name);
    DistributionPtr dist = build(name, *tree);
    building_.erase(name);
    built_[name] = dist;
    return dist;
  }

  const Dataset& csv_pool(const std::string& name) {
    const DistributionPtr d = get(name);
    const auto* pool = dynamic_cast<const PoolDistribution*>(d.get());
    if (pool == nullptr) config_error("dist." + name, "is not a csv pool");
    return pool->pool();
  }

 private:
  DistributionPtr build(const std::string& name, const pt::ptree& tree) {
    const std::string where = "dist." + name;
    const std::string kind = trim(tree.get<std::string>("kind", ""));
    if (kind.empty()) config_error(where, "missing key 'kind'");
    const std::string doc = "dist.<name> kind=" + kind;
    const bool known = std::any_of(section_docs().begin(), section_docs().end(),
                                   [&](const SectionDoc& d) { return d.name == doc; });
    if (!known) config_error(where, "unknown kind '" + kind + "'");
    const Section s(where, &tree, keys_of(doc));

    try {
      if (kind == "gaussian_group") {
        GaussianGroupParams p;
        p.group_mix = s.real("group_mix", 0.5);
        p.offset = s.real("offset", 0.0);
        const double tau = s.real("tau", 0.0);
        p.groups[0] = {s.real("center0", 0.0), s.real("separation0", 1.0), s.real("sd0", 1.0)};
        p.groups[1] = {s.real("center1", tau), s.real("separation1", 1.0), s.real("sd1", 1.0)};
        return std::make_shared<GaussianGroupDistribution>(p);
      }
      if (kind == "latent_linear") {
        LatentLinearParams p;
        const auto dim = s.integer("dim");
        if (dim < 1) config_error(where, "dim must be >= 1");
        const auto mean = s.has("mean") ? s.reals("mean") : std::vector<double>{0.0};
        const auto weights = s.reals("weights");
        if (weights.size() != static_cast<std::size_t>(dim)) config_error(where, "weights must have dim entries");
        if (mean.size() != 1 && mean.size() != static_cast<std::size_t>(dim)) config_error(where, "mean must have 1 or dim entries");
        if (mean.size() == 1) {
          p.mean = Eigen::VectorXd::Constant(dim, mean[0]);
        } else {
          p.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
        }
        p.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), dim);
        p.sd = s.real("sd", 1.0);
        p.bias = s.real("bias", 0.0);
        p.noise_sd = s.real("noise_sd", 0.0);
        p.group_mix = s.real("group_mix", 0.0);
        p.task = parse_task(s.text("task", "classification"));
        return std::make_shared<LatentLinearDistribution>(p);
      }
      if (kind == "mixture") {
        return make_mixture({s.real("weight"), get(s.text("first")), get(s.text("second"))});
      }
      if (kind == "underrep") {
        return make_underrep({s.real("beta"), get(s.text("group0")), get(s.text("group1"))});
      }
      if (kind == "csv") {
        std::filesystem::path path = s.text("path");
        if (path.is_relative()) path = base_dir_ / path;
        if (!std::filesystem::exists(path)) config_error(where, "csv file not found: " + path.string());
        CsvSchema schema;
        schema.label_column = s.text("label_col");
        if (s.has("group_col")) schema.group_column = s.text("group_col");
        schema.task = parse_task(s.text("task", "classification"));
        return std::make_shared<PoolDistribution>(load_csv(path, schema), name);
      }
      // reserve
      const std::string part = s.text("part");
      if (part != "reserved" && part != "remainder") config_error(where, "part must be reserved or remainder");
      const auto n_reserved = s.integer("n_reserved");
      const auto seed = static_cast<std::uint64_t>(s.integer("seed", 0));
      auto [reserved, remainder] = reserve_split(csv_pool(s.text("source")), n_reserved, seed);
      return std::make_shared<PoolDistribution>(part == "reserved" ? std::move(reserved) : std::move(remainder), name);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::SchemaMismatch) throw;
      config_error(where, e.what());
    }
  }

  const pt::ptree& root_;
  std::filesystem::path base_dir_;
  std::map<std::string, DistributionPtr> built_;
  std::set<std::string> building_;
};

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in, const std::filesystem::path& base_dir,
                                         std::optional<std::uint64_t> seed_override) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, tree] : root) {
    const bool known = section == "audit" || section == "learner" || section == "sweep" || section == "output" ||
                       section.rfind("dist.", 0) == 0 || section.rfind("learner.", 0) == 0;
    if (!known) throw Error(ErrorCode::ConfigError, "unknown section [" + section + "]");
    if (tree.data().size() > 0 && tree.empty()) {
      throw Error(ErrorCode::ConfigError, "key '" + section + "' outside any section");
    }
  }

  ExperimentConfig out;
  DistributionBuilder dists(root, base_dir);
  const auto child = [&](const std::string& name) { return find_section(root, name); };

  const Section audit("audit", child("audit"), keys_of("audit"));
  AuditConfig& cfg = out.audit;
  cfg.statistic = parse_statistic(audit.text("statistic", "inter_group_gap"));
  cfg.gap_orientation = parse_gap_orientation(audit.text("gap_orientation", "performance"));
  cfg.sample_size = audit.integer("sample_size", cfg.sample_size);
  if (audit.has("fractions")) {
    const auto f = audit.reals("fractions");
    if (f.size() != kPartitionCount) config_error("audit", "fractions needs five values");
    std::copy(f.begin(), f.end(), cfg.partition.fractions.begin());
  }
  cfg.partition.stratify = audit.boolean("stratify", true);
  cfg.n_control_runs = static_cast<int>(audit.integer("n_control_runs", cfg.n_control_runs));
  cfg.n_shifted_runs = static_cast<int>(audit.integer("n_shifted_runs", cfg.n_shifted_runs));
  cfg.percentile = audit.real("percentile", cfg.percentile);
  cfg.n_q = audit.integer("n_q", cfg.n_q);
  cfg.n_shadows = audit.integer("n_shadows", cfg.n_shadows);
  cfg.auditor_data_fraction = audit.real("auditor_data_fraction", cfg.auditor_data_fraction);
  cfg.seed = static_cast<std::uint64_t>(audit.integer("seed", 0));
  if (seed_override) cfg.seed = *seed_override;
  cfg.workers = static_cast<int>(audit.integer("workers", 1));
  cfg.learner = parse_learner("learner", child("learner"), std::nullopt);
  if (audit.has("normative")) cfg.normative = dists.get(audit.text("normative"));
  if (audit.has("alternative")) cfg.alternative = dists.get(audit.text("alternative"));

  if (const auto* sweep_tree = child("sweep")) {
    const Section s("sweep", sweep_tree, keys_of("sweep"));
    SweepSpec spec;
    spec.axis = parse_sweep_axis(s.text("axis"));
    if (spec.axis == SweepAxis::Learner) {
      for (const auto& name : split_list(s.text("learners"))) {
        Algorithm alg{};
        try {
          alg = parse_algorithm(name);
        } catch (const Error& e) {
          config_error("sweep", e.what());
        }
        spec.learners.push_back(parse_learner("learner." + name, child("learner." + std::string(to_string(alg))), alg));
      }
    } else {
      spec.grid = s.reals("grid");
    }
    if (s.has("first")) spec.first = dists.get(s.text("first"));
    if (s.has("second")) spec.second = dists.get(s.text("second"));
    spec.base = cfg;
    try {
      spec.validate();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error("sweep", e.what());
    }
    out.sweep = std::move(spec);
  }
  for (const auto& [section, tree] : root) {
    if (section.rfind("learner.", 0) == 0) parse_learner(section, &tree, parse_algorithm(section.substr(8)));
  }

  const Section output("output", child("output"), keys_of("output"));
  out.output_dir = output.text("dir", "shift-audit-out");
  if (out.output_dir.is_relative()) out.output_dir = base_dir / out.output_dir;

  // Audits need both distributions; sweeps over alpha or beta build the alternative per cell.
  const bool builds_alternative = out.sweep && (out.sweep->axis == SweepAxis::Alpha || out.sweep->axis == SweepAxis::Beta);
  if (!builds_alternative) {
    if (!cfg.normative || !cfg.alternative) config_error("audit", "normative and alternative are required");
    try {
      cfg.validate();
    } catch (const Error& e) {
      config_error("audit", e.what());
    }
    if (out.sweep) out.sweep->base = cfg;
  }
  return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
  return parse_experiment_config(in, path.parent_path(), seed_override);
}

std::string config_reference() {
  std::ostringstream os;
  for (const auto& section : section_docs()) {
    os << '[' << section.name << "]\n  " << section.help << '\n';
    for (const auto& k : section.keys) {
      os << "  " << k.key << " = " << (k.fallback.empty() ? "(required)" : std::string(k.fallback)) << "\n      "
         << k.help << '\n';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace shiftaudit
