#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "greenflow/calibrate.hpp"
#include "greenflow/simulate.hpp"
#include "greenflow/synth.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

// Full frequency-reduction sweep over schedulers x workflows x reductions
// and sweet-spot selection under the weighted energy/time objective.

struct SweepCell {
  SchedulerKind scheduler;
  std::string workflow;
  double reduction = 0.0;
  double tat_ms = 0.0;
  double energy_kwh = 0.0;
};

struct ObjectiveWeights {
  double alpha_energy = 0.5;
  double beta_time = 0.5;
};

struct SweetSpotResult {
  SchedulerKind scheduler;
  std::string workflow;
  double best_reduction = 0.0;
  double objective_value = 0.0;
  double tat_increase_pct = 0.0;
  double energy_saving_pct = 0.0;
};

inline std::vector<SweepCell> sweep_simulated(const CalibrationResult& calib,
                                              const HardwareModel& hw = HardwareModel()) {
  std::vector<SweepCell> grid;
  for (const auto& [key, params] : calib.params) {
    const WorkflowSpec& wf = workflow_by_id(key.second);
    ExecutionTrace base = simulate(wf, key.first, FrequencyConfig{}, params, calib.seed, hw);
    for (double r : kReductionGrid) {
      ExecutionTrace t = apply_frequency_reduction(base, r, params);
      grid.push_back({key.first, key.second, r, t.tat_ms, t.energy_kwh});
    }
  }
  return grid;
}

// Aggregates an accepted synthetic pool by mean per (scheduler, workflow,
// reduction) triple; reductions snap to the nearest grid point.
inline std::vector<SweepCell> sweep_synthetic(const std::vector<SyntheticRecord>& records) {
  std::map<std::tuple<SchedulerKind, std::string, double>, std::pair<SweepCell, std::size_t>> acc;
  for (const auto& rec : records) {
    if (!rec.accepted) continue;
    double snapped = kReductionGrid[0];
    for (double g : kReductionGrid)
      if (std::abs(rec.reduction - g) < std::abs(rec.reduction - snapped)) snapped = g;
    auto key = std::make_tuple(rec.scheduler, rec.workflow, snapped);
    auto& [cell, n] = acc[key];
    if (n == 0) cell = {rec.scheduler, rec.workflow, snapped, 0.0, 0.0};
    cell.tat_ms += rec.tat_ms;
    cell.energy_kwh += rec.energy_kwh;
    ++n;
  }
  std::vector<SweepCell> grid;
  std::vector<std::string> gaps;
  for (auto sched : kAllSchedulers)
    for (const auto& wf : canonical_workflows())
      for (double r : kReductionGrid) {
        auto it = acc.find(std::make_tuple(sched, wf.id, r));
        if (it == acc.end()) {
          gaps.push_back(std::string(to_string(sched)) + "/" + wf.id + "/" +
                         std::to_string(r));
          continue;
        }
        SweepCell cell = it->second.first;
        cell.tat_ms /= static_cast<double>(it->second.second);
        cell.energy_kwh /= static_cast<double>(it->second.second);
        grid.push_back(cell);
      }
  if (!gaps.empty()) {
    std::string msg = "synthetic pool missing triples:";
    for (const auto& g : gaps) msg += " " + g;
    throw coverage_error(msg);
  }
  return grid;
}

namespace detail {

inline std::map<PairKey, std::vector<const SweepCell*>> group_by_pair(
    const std::vector<SweepCell>& grid) {
  std::map<PairKey, std::vector<const SweepCell*>> pairs;
  for (const auto& c : grid) pairs[{c.scheduler, c.workflow}].push_back(&c);
  for (auto& [key, cells] : pairs) {
    std::sort(cells.begin(), cells.end(),
              [](const SweepCell* a, const SweepCell* b) { return a->reduction < b->reduction; });
    if (cells.size() != kReductionGrid.size())
      throw coverage_error("grid incomplete for " + std::string(to_string(key.first)) + "/" +
                           key.second);
  }
  return pairs;
}

}  // namespace detail

// Per pair: min over reductions of alpha*E' + beta*T', with E and T each
// min-max normalized over that pair's cells (the raw units are incomparable
// and kWh would otherwise dominate). Ties break toward the larger reduction.
inline std::vector<SweetSpotResult> sweet_spot(const std::vector<SweepCell>& grid,
                                               const ObjectiveWeights& weights) {
  if (weights.alpha_energy < 0.0 || weights.beta_time < 0.0 ||
      (weights.alpha_energy == 0.0 && weights.beta_time == 0.0))
    throw invalid_parameter("sweet_spot: weights must be non-negative, not both zero");
  std::vector<SweetSpotResult> results;
  for (const auto& [key, cells] : detail::group_by_pair(grid)) {
    double e_min = cells[0]->energy_kwh, e_max = e_min;
    double t_min = cells[0]->tat_ms, t_max = t_min;
    for (const auto* c : cells) {
      e_min = std::min(e_min, c->energy_kwh);
      e_max = std::max(e_max, c->energy_kwh);
      t_min = std::min(t_min, c->tat_ms);
      t_max = std::max(t_max, c->tat_ms);
    }
    auto norm = [](double v, double lo, double hi) {
      return hi > lo ? (v - lo) / (hi - lo) : 0.0;
    };
    const SweepCell* best = nullptr;
    double best_obj = 0.0;
    for (const auto* c : cells) {
      double obj = weights.alpha_energy * norm(c->energy_kwh, e_min, e_max) +
                   weights.beta_time * norm(c->tat_ms, t_min, t_max);
      if (!best || obj < best_obj - 1e-12 ||
          (std::abs(obj - best_obj) <= 1e-12 && c->reduction > best->reduction)) {
        best = c;
        best_obj = obj;
      }
    }
    const SweepCell* base = cells[0];  // reduction 0
    results.push_back({key.first, key.second, best->reduction, best_obj,
                       (best->tat_ms / base->tat_ms - 1.0) * 100.0,
                       (1.0 - best->energy_kwh / base->energy_kwh) * 100.0});
  }
  return results;
}

struct TradeoffRow {
  double reduction = 0.0;
  double mean_tat_increase_pct = 0.0;
  double mean_energy_saving_pct = 0.0;
};

inline std::vector<TradeoffRow> tradeoff_report(const std::vector<SweepCell>& grid) {
  auto pairs = detail::group_by_pair(grid);
  std::vector<TradeoffRow> rows;
  for (double r : kReductionGrid) {
    TradeoffRow row{r, 0.0, 0.0};
    for (const auto& [key, cells] : pairs) {
      const SweepCell* base = cells[0];
      const SweepCell* cell = nullptr;
      for (const auto* c : cells)
        if (std::abs(c->reduction - r) < 1e-9) cell = c;
      row.mean_tat_increase_pct += (cell->tat_ms / base->tat_ms - 1.0) * 100.0;
      row.mean_energy_saving_pct += (1.0 - cell->energy_kwh / base->energy_kwh) * 100.0;
    }
    row.mean_tat_increase_pct /= static_cast<double>(pairs.size());
    row.mean_energy_saving_pct /= static_cast<double>(pairs.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace greenflow
