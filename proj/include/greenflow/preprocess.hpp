#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "greenflow/errors.hpp"
#include "greenflow/rng.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

// Turns execution traces into the scaled/one-hot training matrix and inverts
// the transform for decoded samples. Scaling ranges are frozen from training
// data and reused at generation time; decoded numerics are clipped to [0,1]
// before inversion.

struct CategoricalFeature {
  std::string name;
  std::vector<std::string> categories;  // ordered, index = one-hot position
};

struct NumericFeature {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

struct FeatureSchema {
  std::vector<CategoricalFeature> categoricals;  // emitted first, in order
  std::vector<NumericFeature> numerics;

  std::size_t width() const {
    std::size_t k = 0;
    for (const auto& c : categoricals) k += c.categories.size();
    return k + numerics.size();
  }
};

inline std::vector<double> one_hot(const std::string& value, const CategoricalFeature& feature) {
  std::vector<double> v(feature.categories.size(), 0.0);
  auto it = std::find(feature.categories.begin(), feature.categories.end(), value);
  if (it == feature.categories.end())
    throw encoding_error("unknown category '" + value + "' for feature " + feature.name);
  v[static_cast<std::size_t>(it - feature.categories.begin())] = 1.0;
  return v;
}

inline double min_max_scale(double v, double min, double max) {
  if (max < min) throw invalid_parameter("min_max_scale: max < min");
  if (max == min) return 0.0;  // degenerate range
  return (v - min) / (max - min);
}

inline double min_max_invert(double x, double min, double max) {
  x = std::clamp(x, 0.0, 1.0);
  return min + x * (max - min);
}

// One raw sample: categorical labels plus numerics (NaN = missing, imputed
// with the column mean).
struct RawRow {
  std::string scheduler;
  std::string workflow;
  std::vector<double> numerics;  // order: tasks, reduction, tat_ms, power_w, energy_kwh
};

inline const std::vector<std::string>& numeric_feature_names() {
  static const std::vector<std::string> names = {"tasks", "reduction", "tat_ms", "power_w",
                                                 "energy_kwh"};
  return names;
}

inline RawRow raw_row_from_trace(const ExecutionTrace& t) {
  RawRow r;
  r.scheduler = to_string(t.scheduler);
  r.workflow = t.workflow;
  double reduction = 1.0 - t.effective_freq_ghz * 1e9 / kBaseFreqHz;
  r.numerics = {static_cast<double>(t.tasks), reduction, t.tat_ms, t.avg_power_w, t.energy_kwh};
  return r;
}

struct Dataset {
  std::vector<std::vector<double>> matrix;  // m x k, all entries in [0,1]
  FeatureSchema schema;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
};

inline Dataset assemble(const std::vector<RawRow>& rows, std::uint64_t seed) {
  if (rows.empty()) throw empty_dataset_error("assemble: empty input");
  if (rows.size() < 2) throw empty_dataset_error("assemble: need at least 2 rows");

  Dataset ds;
  CategoricalFeature sched{"scheduler", {}};
  for (auto k : kAllSchedulers) sched.categories.emplace_back(to_string(k));
  CategoricalFeature wf{"workflow", {"WF-1", "WF-2", "WF-3", "WF-4", "WF-5"}};
  ds.schema.categoricals = {sched, wf};

  const auto& names = numeric_feature_names();
  std::size_t n_num = names.size();
  for (const auto& r : rows)
    if (r.numerics.size() != n_num) throw schema_error("assemble: numeric column count mismatch");

  // column means over observed entries, then impute
  std::vector<std::vector<double>> numerics(rows.size());
  std::vector<double> mean(n_num, 0.0);
  std::vector<std::size_t> count(n_num, 0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < n_num; ++j)
      if (std::isfinite(r.numerics[j])) {
        mean[j] += r.numerics[j];
        ++count[j];
      }
  for (std::size_t j = 0; j < n_num; ++j) {
    if (count[j] == 0) throw validation_error("assemble: column '" + names[j] + "' has no data");
    mean[j] /= static_cast<double>(count[j]);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    numerics[i] = rows[i].numerics;
    for (std::size_t j = 0; j < n_num; ++j)
      if (!std::isfinite(numerics[i][j])) numerics[i][j] = mean[j];
  }

  for (std::size_t j = 0; j < n_num; ++j) {
    NumericFeature f{names[j], numerics[0][j], numerics[0][j]};
    for (const auto& r : numerics) {
      f.min = std::min(f.min, r[j]);
      f.max = std::max(f.max, r[j]);
    }
    ds.schema.numerics.push_back(f);
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> out;
    out.reserve(ds.schema.width());
    auto s = one_hot(rows[i].scheduler, ds.schema.categoricals[0]);
    auto w = one_hot(rows[i].workflow, ds.schema.categoricals[1]);
    out.insert(out.end(), s.begin(), s.end());
    out.insert(out.end(), w.begin(), w.end());
    for (std::size_t j = 0; j < n_num; ++j)
      out.push_back(min_max_scale(numerics[i][j], ds.schema.numerics[j].min,
                                  ds.schema.numerics[j].max));
    ds.matrix.push_back(std::move(out));
  }

  // 80/20 split by seeded shuffle
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(seed, "split");
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.index(i)]);
  std::size_t n_train = std::max<std::size_t>(1, (rows.size() * 8) / 10);
  ds.train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  ds.val_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return ds;
}

struct DecodedSample {
  std::string scheduler;
  std::string workflow;
  std::vector<double> numerics;  // physical units, numeric_feature_names order
};

// argmax per one-hot block (ties to the lowest index), affine inverse on the
// clipped numerics.
inline DecodedSample invert(const std::vector<double>& decoded_row, const FeatureSchema& schema) {
  if (decoded_row.size() != schema.width())
    throw schema_error("invert: row length does not match schema");
  DecodedSample out;
  std::size_t pos = 0;
  std::vector<std::string> labels;
  for (const auto& cat : schema.categoricals) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < cat.categories.size(); ++j)
      if (decoded_row[pos + j] > decoded_row[pos + best]) best = j;
    labels.push_back(cat.categories[best]);
    pos += cat.categories.size();
  }
  out.scheduler = labels.size() > 0 ? labels[0] : "";
  out.workflow = labels.size() > 1 ? labels[1] : "";
  for (const auto& num : schema.numerics) {
    out.numerics.push_back(min_max_invert(decoded_row[pos], num.min, num.max));
    ++pos;
  }
  return out;
}

inline std::size_t numeric_index(const std::string& name) {
  const auto& names = numeric_feature_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw schema_error("unknown numeric feature: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace greenflow
