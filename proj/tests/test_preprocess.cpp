#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "greenflow/preprocess.hpp"

using namespace greenflow;

namespace {

RawRow make_row(const char* sched, const char* wf, double tasks, double reduction,
                double tat, double power, double energy) {
  RawRow r;
  r.scheduler = sched;
  r.workflow = wf;
  r.numerics = {tasks, reduction, tat, power, energy};
  return r;
}

std::vector<RawRow> sample_rows() {
  return {
      make_row("FCFS", "WF-1", 500, 0.00, 505.07, 890.94, 12.50),
      make_row("LAS", "WF-2", 600, 0.05, 539.05, 1720.63, 25.76),
      make_row("LASP", "WF-3", 750, 0.10, 604.29, 3049.45, 51.19),
      make_row("LYNX", "WF-4", 800, 0.15, 644.90, 3327.48, 59.61),
      make_row("SAS", "WF-5", 900, 0.20, 584.62, 3965.44, 64.40),
      make_row("OMFNN", "WF-1", 500, 0.10, 345.00, 1830.44, 17.50),
  };
}

}  // namespace

TEST_CASE("one-hot encoding is exact and total") {
  CategoricalFeature f{"scheduler", {"FCFS", "LAS", "LASP", "LYNX", "SAS", "OMFNN"}};
  auto v = one_hot("FCFS", f);
  CHECK(v == std::vector<double>{1, 0, 0, 0, 0, 0});
  for (const auto& c : f.categories) {
    auto u = one_hot(c, f);
    double sum = 0;
    for (double x : u) sum += x;
    CHECK(sum == 1.0);
  }
  CHECK_THROWS_AS(one_hot("RR", f), encoding_error);
}

TEST_CASE("min-max scaling boundaries, midpoint, and degenerate range") {
  CHECK(min_max_scale(3.0, 3.0, 9.0) == 0.0);
  CHECK(min_max_scale(9.0, 3.0, 9.0) == 1.0);
  CHECK(min_max_scale(6.0, 3.0, 9.0) == doctest::Approx(0.5));
  CHECK(min_max_scale(5.0, 5.0, 5.0) == 0.0);
  CHECK_THROWS_AS(min_max_scale(1.0, 2.0, 1.0), invalid_parameter);
  // inversion clips out-of-range values into the frozen range
  CHECK(min_max_invert(-0.5, 3.0, 9.0) == 3.0);
  CHECK(min_max_invert(1.5, 3.0, 9.0) == 9.0);
  CHECK(min_max_invert(0.5, 3.0, 9.0) == doctest::Approx(6.0));
}

TEST_CASE("assemble builds a scaled matrix with the declared width") {
  Dataset ds = assemble(sample_rows(), 1);
  // 6 scheduler + 5 workflow one-hot columns + 5 numerics
  CHECK(ds.schema.width() == 16);
  REQUIRE(ds.matrix.size() == 6);
  for (const auto& row : ds.matrix) {
    REQUIRE(row.size() == 16);
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("split is a deterministic disjoint 80/20 partition") {
  Dataset a = assemble(sample_rows(), 9);
  Dataset b = assemble(sample_rows(), 9);
  CHECK(a.train_idx == b.train_idx);
  CHECK(a.val_idx == b.val_idx);
  std::set<std::size_t> seen(a.train_idx.begin(), a.train_idx.end());
  for (auto i : a.val_idx) CHECK(seen.insert(i).second);
  CHECK(seen.size() == a.matrix.size());
  Dataset c = assemble(sample_rows(), 10);
  CHECK(a.train_idx != c.train_idx);
}

TEST_CASE("missing numerics are imputed with the column mean") {
  auto rows = sample_rows();
  double nan = std::numeric_limits<double>::quiet_NaN();
  rows[2].numerics[3] = nan;  // power_w
  double mean = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i != 2) {
      mean += rows[i].numerics[3];
      ++n;
    }
  mean /= n;
  Dataset ds = assemble(rows, 1);
  std::size_t col = 11 + numeric_index("power_w");
  const auto& f = ds.schema.numerics[numeric_index("power_w")];
  double recovered = min_max_invert(ds.matrix[2][col], f.min, f.max);
  CHECK(recovered == doctest::Approx(mean).epsilon(1e-9));
}

TEST_CASE("invert round-trips assembled rows") {
  auto rows = sample_rows();
  Dataset ds = assemble(rows, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    DecodedSample d = invert(ds.matrix[i], ds.schema);
    CHECK(d.scheduler == rows[i].scheduler);
    CHECK(d.workflow == rows[i].workflow);
    for (std::size_t j = 0; j < d.numerics.size(); ++j)
      CHECK(d.numerics[j] == doctest::Approx(rows[i].numerics[j]).epsilon(1e-9));
  }
}

TEST_CASE("invert argmax semantics and tie-break to the lowest index") {
  Dataset ds = assemble(sample_rows(), 1);
  std::vector<double> row(ds.schema.width(), 0.0);
  row[1] = 0.9;  // second scheduler category
  row[0] = 0.2;
  DecodedSample d = invert(row, ds.schema);
  CHECK(d.scheduler == ds.schema.categoricals[0].categories[1]);
  std::vector<double> tie(ds.schema.width(), 0.5);
  DecodedSample t = invert(tie, ds.schema);
  CHECK(t.scheduler == ds.schema.categoricals[0].categories[0]);
  CHECK(t.workflow == ds.schema.categoricals[1].categories[0]);
}

TEST_CASE("schema mismatches are rejected") {
  Dataset ds = assemble(sample_rows(), 1);
  std::vector<double> bad(ds.schema.width() + 1, 0.0);
  CHECK_THROWS_AS(invert(bad, ds.schema), schema_error);
  CHECK_THROWS_AS(assemble({}, 1), empty_dataset_error);
  CHECK_THROWS_AS(assemble({sample_rows()[0]}, 1), empty_dataset_error);
}

TEST_CASE("trace conversion recovers the reduction from the effective frequency") {
  ExecutionTrace t;
  t.scheduler = SchedulerKind::SAS;
  t.workflow = "WF-5";
  t.tasks = 900;
  t.tat_ms = 584.62;
  t.avg_power_w = 3965.44;
  t.energy_kwh = 64.40;
  t.effective_freq_ghz = 2.1 * 0.85;
  RawRow r = raw_row_from_trace(t);
  CHECK(r.scheduler == "SAS");
  CHECK(r.numerics[numeric_index("reduction")] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(r.numerics[numeric_index("tasks")] == 900.0);
}
