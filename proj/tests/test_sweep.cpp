#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "greenflow/sweep.hpp"

using namespace greenflow;

namespace {

std::string data_file(const char* name) {
  return std::string(GREENFLOW_DATA_DIR) + "/" + name;
}

CalibrationResult calibrated() {
  auto base = load_table(data_file("table3.csv")).traces;
  auto reduction = load_reduction_table(data_file("table4.csv"));
  return calibrate(base, reduction, 1);
}

}  // namespace

TEST_CASE("simulated sweep covers the full 150-cell grid") {
  CalibrationResult calib = calibrated();
  auto grid = sweep_simulated(calib);
  CHECK(grid.size() == 150);
  std::map<std::tuple<SchedulerKind, std::string, double>, int> seen;
  for (const auto& c : grid) ++seen[{c.scheduler, c.workflow, c.reduction}];
  CHECK(seen.size() == 150);  // one cell per triple

  // reduction-0 cells reproduce the base table within calibration tolerance
  auto base = load_table(data_file("table3.csv")).traces;
  for (const auto& t : base) {
    auto it = seen.find({t.scheduler, t.workflow, 0.0});
    REQUIRE(it != seen.end());
  }
  for (const auto& c : grid) {
    if (c.reduction != 0.0) continue;
    for (const auto& t : base)
      if (t.scheduler == c.scheduler && t.workflow == c.workflow) {
        CHECK(c.tat_ms == doctest::Approx(t.tat_ms).epsilon(kBaseFitTolerance));
        CHECK(c.energy_kwh == doctest::Approx(t.energy_kwh).epsilon(kBaseFitTolerance));
      }
  }
}

TEST_CASE("15% cells land on the published reduced columns within 2%") {
  CalibrationResult calib = calibrated();
  auto grid = sweep_simulated(calib);
  auto reduced = load_reduction_table(data_file("table4.csv"));
  for (const auto& r : reduced)
    for (const auto& c : grid)
      if (c.scheduler == r.scheduler && c.workflow == r.workflow &&
          std::abs(c.reduction - 0.15) < 1e-9) {
        CHECK(c.tat_ms == doctest::Approx(r.tat_15_ms).epsilon(kReductionFitTolerance));
        CHECK(c.energy_kwh == doctest::Approx(r.energy_15_kwh).epsilon(kReductionFitTolerance));
      }
}

TEST_CASE("grid monotonicity along the reduction axis") {
  auto grid = sweep_simulated(calibrated());
  std::map<PairKey, std::map<double, const SweepCell*>> by_pair;
  for (const auto& c : grid) by_pair[{c.scheduler, c.workflow}][c.reduction] = &c;
  for (const auto& [key, cells] : by_pair) {
    double prev_tat = -1.0, prev_e = 1e18;
    for (const auto& [r, c] : cells) {
      CHECK(c->tat_ms > prev_tat);
      CHECK(c->energy_kwh < prev_e);
      prev_tat = c->tat_ms;
      prev_e = c->energy_kwh;
    }
  }
}

TEST_CASE("degenerate weights pick the grid extremes") {
  auto grid = sweep_simulated(calibrated());
  for (const auto& s : sweet_spot(grid, {1.0, 0.0}))
    CHECK(s.best_reduction == doctest::Approx(0.20));
  for (const auto& s : sweet_spot(grid, {0.0, 1.0}))
    CHECK(s.best_reduction == doctest::Approx(0.0));
}

TEST_CASE("equal weights: choice matches brute force, 15% dominates") {
  auto grid = sweep_simulated(calibrated());
  ObjectiveWeights w{0.5, 0.5};
  auto spots = sweet_spot(grid, w);
  REQUIRE(spots.size() == 30);

  std::map<PairKey, std::vector<const SweepCell*>> by_pair;
  for (const auto& c : grid) by_pair[{c.scheduler, c.workflow}].push_back(&c);
  int fifteen = 0;
  for (const auto& s : spots) {
    const auto& cells = by_pair.at({s.scheduler, s.workflow});
    // independent brute force over the pair's five cells
    double e_min = 1e18, e_max = -1e18, t_min = 1e18, t_max = -1e18;
    for (const auto* c : cells) {
      e_min = std::min(e_min, c->energy_kwh);
      e_max = std::max(e_max, c->energy_kwh);
      t_min = std::min(t_min, c->tat_ms);
      t_max = std::max(t_max, c->tat_ms);
    }
    double best_obj = 1e18, best_r = -1.0;
    for (const auto* c : cells) {
      double obj = 0.5 * (c->energy_kwh - e_min) / (e_max - e_min) +
                   0.5 * (c->tat_ms - t_min) / (t_max - t_min);
      if (obj < best_obj - 1e-12 ||
          (std::abs(obj - best_obj) <= 1e-12 && c->reduction > best_r)) {
        best_obj = obj;
        best_r = c->reduction;
      }
    }
    CHECK(s.best_reduction == doctest::Approx(best_r));
    if (std::abs(s.best_reduction - 0.15) < 1e-9) ++fifteen;
  }
  CHECK(fifteen > 15);  // majority of the 30 pairs
}

TEST_CASE("sweet spot is invariant under joint positive weight rescaling") {
  auto grid = sweep_simulated(calibrated());
  auto a = sweet_spot(grid, {0.5, 0.5});
  auto b = sweet_spot(grid, {2.5, 2.5});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].best_reduction == b[i].best_reduction);
  CHECK_THROWS_AS(sweet_spot(grid, {0.0, 0.0}), invalid_parameter);
  CHECK_THROWS_AS(sweet_spot(grid, {-1.0, 1.0}), invalid_parameter);
}

TEST_CASE("aggregate trade-off bands match the reported behavior") {
  auto grid = sweep_simulated(calibrated());
  auto rows = tradeoff_report(grid);
  REQUIRE(rows.size() == kReductionGrid.size());
  std::map<double, TradeoffRow> by_r;
  for (const auto& r : rows) by_r[r.reduction] = r;
  CHECK(by_r.at(0.0).mean_tat_increase_pct == doctest::Approx(0.0));
  CHECK(by_r.at(0.0).mean_energy_saving_pct == doctest::Approx(0.0));
  CHECK(by_r.at(0.15).mean_tat_increase_pct > 4.5);
  CHECK(by_r.at(0.15).mean_tat_increase_pct < 7.0);
  CHECK(by_r.at(0.15).mean_energy_saving_pct > 8.0);
  CHECK(by_r.at(0.15).mean_energy_saving_pct < 11.0);
  // 5% bands reproduced within one percentage point
  CHECK(by_r.at(0.05).mean_tat_increase_pct > 3.05 - 1.0);
  CHECK(by_r.at(0.05).mean_tat_increase_pct < 3.90 + 1.0);
  CHECK(by_r.at(0.05).mean_energy_saving_pct > 4.14 - 1.0);
  CHECK(by_r.at(0.05).mean_energy_saving_pct < 4.81 + 1.0);
}

TEST_CASE("synthetic sweep aggregates by snapped triple and reports gaps") {
  std::vector<SyntheticRecord> pool;
  for (auto s : kAllSchedulers)
    for (const auto& wf : canonical_workflows())
      for (double r : kReductionGrid)
        for (int rep = 0; rep < 2; ++rep) {
          SyntheticRecord rec;
          rec.scheduler = s;
          rec.workflow = wf.id;
          rec.reduction = r + (rep ? 0.004 : -0.004);
          rec.tat_ms = 500.0 + (rep ? 20.0 : 0.0);
          rec.energy_kwh = 30.0 + (rep ? 2.0 : 0.0);
          rec.accepted = true;
          pool.push_back(rec);
        }
  auto grid = sweep_synthetic(pool);
  CHECK(grid.size() == 150);
  for (const auto& c : grid) {
    CHECK(c.tat_ms == doctest::Approx(510.0));
    CHECK(c.energy_kwh == doctest::Approx(31.0));
  }
  // drop all cells of one triple: coverage error naming it
  std::vector<SyntheticRecord> gappy;
  for (const auto& rec : pool)
    if (!(rec.scheduler == SchedulerKind::SAS && rec.workflow == "WF-3" &&
          std::abs(rec.reduction - 0.10) < 0.01))
      gappy.push_back(rec);
  try {
    sweep_synthetic(gappy);
    FAIL("expected coverage_error");
  } catch (const coverage_error& e) {
    CHECK(std::string(e.what()).find("SAS/WF-3") != std::string::npos);
  }
}
