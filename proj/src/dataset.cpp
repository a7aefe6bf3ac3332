#include "shiftaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shiftaudit/error.hpp"
#include "shiftaudit/random.hpp"

namespace shiftaudit {

std::string_view to_string(TaskKind task) {
  return task == TaskKind::Classification ? "classification" : "regression";
}

TaskKind parse_task(std::string_view text) {
  if (text == "classification") return TaskKind::Classification;
  if (text == "regression") return TaskKind::Regression;
  throw Error(ErrorCode::InvalidArgument, "unknown task '" + std::string(text) + "'");
}

Dataset::Dataset(FeatureMatrix features, Eigen::VectorXd labels, GroupVector groups,
                 TaskKind task)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      task_(task) {
  if (features_.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "dataset dimensionality must be positive");
  }
  if (features_.rows() != labels_.size() || groups_.size() != labels_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features, labels and groups differ in length");
  }
  if (!features_.allFinite() || !labels_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite values");
  }
  for (Index i = 0; i < size(); ++i) {
    if (groups_[i] != 0 && groups_[i] != 1) {
      throw Error(ErrorCode::InvalidArgument, "group tag must be 0 or 1");
    }
    if (task_ == TaskKind::Classification && labels_[i] != 0.0 && labels_[i] != 1.0) {
      throw Error(ErrorCode::InvalidArgument, "classification labels must be 0 or 1");
    }
  }
}

Dataset Dataset::empty(Index dim, TaskKind task) {
  return Dataset(FeatureMatrix(0, dim), Eigen::VectorXd(0), GroupVector(0), task);
}

Dataset Dataset::from_examples(std::span<const Example> examples, Index dim, TaskKind task) {
  const auto n = static_cast<Index>(examples.size());
  FeatureMatrix x(n, dim);
  Eigen::VectorXd y(n);
  GroupVector z(n);
  for (Index i = 0; i < n; ++i) {
    const auto& ex = examples[static_cast<std::size_t>(i)];
    if (ex.features.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "example has wrong feature count");
    }
    x.row(i) = ex.features.transpose();
    y[i] = ex.label;
    z[i] = ex.group;
  }
  return Dataset(std::move(x), std::move(y), std::move(z), task);
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "concat: widths differ");
  if (a.task() != b.task()) throw Error(ErrorCode::IncompatibleTask, "concat: tasks differ");
  FeatureMatrix x(a.size() + b.size(), a.dim());
  x << a.features(), b.features();
  Eigen::VectorXd y(a.size() + b.size());
  y << a.labels(), b.labels();
  GroupVector z(a.size() + b.size());
  z << a.groups(), b.groups();
  return Dataset(std::move(x), std::move(y), std::move(z), a.task());
}

Example Dataset::example(Index i) const {
  return Example{features_.row(i).transpose(), labels_[i], groups_[i]};
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  const auto n = static_cast<Index>(rows.size());
  FeatureMatrix x(n, dim());
  Eigen::VectorXd y(n);
  GroupVector z(n);
  for (Index i = 0; i < n; ++i) {
    const Index r = rows[static_cast<std::size_t>(i)];
    x.row(i) = features_.row(r);
    y[i] = labels_[r];
    z[i] = groups_[r];
  }
  return Dataset(std::move(x), std::move(y), std::move(z), task_);
}

Dataset Dataset::with_group(int group) const {
  std::vector<Index> rows;
  for (Index i = 0; i < size(); ++i) {
    if (groups_[i] == group) rows.push_back(i);
  }
  return subset(rows);
}

Index Dataset::count_group(int group) const { return (groups_.array() == group).count(); }

Index Dataset::count_label(double label) const { return (labels_.array() == label).count(); }

// ---------------------------------------------------------------------------

void PartitionPlan::validate() const {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw Error(ErrorCode::InvalidArgument, "partition fractions must be nonnegative");
    }
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "partition fractions must sum to 1");
  }
}

std::vector<Index> apportion(Index total, std::span<const double> fractions,
                             std::span<Index> bonus) {
  const std::size_t k = fractions.size();
  std::vector<Index> counts(k);
  std::vector<double> remainder(k);
  Index assigned = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const double quota = fractions[p] * static_cast<double>(total);
    counts[p] = static_cast<Index>(std::floor(quota + 1e-9));
    remainder[p] = fractions[p] > 0.0 ? quota - static_cast<double>(counts[p]) : -1.0;
    assigned += counts[p];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    if (bonus[a] != bonus[b]) return bonus[a] < bonus[b];
    return a < b;
  });
  for (std::size_t i = 0; assigned < total; ++i) {
    const std::size_t p = order[i % k];
    if (fractions[p] <= 0.0) continue;
    ++counts[p];
    ++bonus[p];
    ++assigned;
  }
  // Fractions summing to slightly above one can overshoot by a unit.
  for (auto it = order.rbegin(); assigned > total && it != order.rend(); ++it) {
    if (counts[*it] > 0) {
      --counts[*it];
      --assigned;
    }
  }
  return counts;
}

Partitions stratified_split(const Dataset& data, const PartitionPlan& plan) {
  plan.validate();
  if (data.is_empty()) throw Error(ErrorCode::InvalidArgument, "cannot split an empty dataset");

  std::vector<std::vector<Index>> strata;
  if (plan.stratify && data.task() == TaskKind::Classification) {
    strata.resize(2);
    for (Index i = 0; i < data.size(); ++i) {
      strata[data.labels()[i] == 1.0 ? 1 : 0].push_back(i);
    }
    const auto active = std::count_if(plan.fractions.begin(), plan.fractions.end(),
                                      [](double f) { return f > 0.0; });
    for (std::size_t c = 0; c < strata.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(strata[c].size()) < active) {
        throw Error(ErrorCode::StratumTooSmall,
                    "class " + std::to_string(c) + " has " + std::to_string(strata[c].size()) +
                        " examples for " + std::to_string(active) + " partitions");
      }
    }
  } else {
    strata.emplace_back(static_cast<std::size_t>(data.size()));
    std::iota(strata[0].begin(), strata[0].end(), Index{0});
  }

  Rng rng = make_rng(plan.seed);
  std::array<std::vector<Index>, kPartitionCount> rows;
  std::array<Index, kPartitionCount> bonus{};
  for (auto& stratum : strata) {
    std::shuffle(stratum.begin(), stratum.end(), rng);
    const auto counts = apportion(static_cast<Index>(stratum.size()), plan.fractions, bonus);
    auto it = stratum.begin();
    for (std::size_t p = 0; p < kPartitionCount; ++p) {
      rows[p].insert(rows[p].end(), it, it + counts[p]);
      it += counts[p];
    }
  }

  for (std::size_t p = 0; p < kPartitionCount; ++p) {
    if (plan.fractions[p] > 0.0 && rows[p].empty()) {
      throw Error(ErrorCode::EmptyPartition,
                  "partition " + std::to_string(p) + " materializes with zero examples");
    }
  }
  return {data.subset(rows[0]), data.subset(rows[1]), data.subset(rows[2]),
          data.subset(rows[3]), data.subset(rows[4])};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_cell(const std::string& text, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(row, column, "'" + text + "' is not a finite number");
  }
  return value;
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  std::optional<std::size_t> label_at;
  std::optional<std::size_t> group_at;
  std::vector<std::size_t> feature_at;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column) {
      if (label_at) throw Error(ErrorCode::SchemaMismatch, "label column appears twice");
      label_at = c;
    } else if (schema.group_column && header[c] == *schema.group_column) {
      if (group_at) throw Error(ErrorCode::SchemaMismatch, "group column appears twice");
      group_at = c;
    } else {
      feature_at.push_back(c);
    }
  }
  if (!label_at) {
    throw Error(ErrorCode::SchemaMismatch, "label column '" + schema.label_column + "' not found");
  }
  if (schema.group_column && !group_at) {
    throw Error(ErrorCode::SchemaMismatch,
                "group column '" + *schema.group_column + "' not found");
  }
  if (feature_at.empty()) throw Error(ErrorCode::SchemaMismatch, "no feature columns");

  const auto dim = static_cast<Index>(feature_at.size());
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> z;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(row, "*", "expected " + std::to_string(header.size()) + " cells, found " +
                                     std::to_string(cells.size()));
    }
    for (std::size_t c : feature_at) x.push_back(parse_cell(trim(cells[c]), row, header[c]));
    const double label = parse_cell(trim(cells[*label_at]), row, header[*label_at]);
    if (schema.task == TaskKind::Classification && label != 0.0 && label != 1.0) {
      throw ParseError(row, header[*label_at], "classification label must be 0 or 1");
    }
    y.push_back(label);
    if (group_at) {
      const double g = parse_cell(trim(cells[*group_at]), row, header[*group_at]);
      if (g != 0.0 && g != 1.0) throw ParseError(row, header[*group_at], "group must be 0 or 1");
      z.push_back(static_cast<int>(g));
    } else {
      z.push_back(0);
    }
  }

  const auto n = static_cast<Index>(y.size());
  FeatureMatrix features = Eigen::Map<FeatureMatrix>(x.data(), n, dim);
  return Dataset(std::move(features), Eigen::Map<Eigen::VectorXd>(y.data(), n),
                 Eigen::Map<GroupVector>(z.data(), n), schema.task);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "y,z\n";
  std::array<char, 64> buf{};
  const auto put = [&](double v) {
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), res.ptr - buf.data());
  };
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      put(data.features()(i, j));
      out << ',';
    }
    put(data.labels()[i]);
    out << ',' << data.groups()[i] << '\n';
  }
}

}  // namespace shiftaudit
