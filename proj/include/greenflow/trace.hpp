#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "greenflow/errors.hpp"

namespace greenflow {

enum class SchedulerKind { FCFS, LAS, LASP, LYNX, SAS, OMFNN };

inline constexpr std::array<SchedulerKind, 6> kAllSchedulers = {
    SchedulerKind::FCFS, SchedulerKind::LAS,  SchedulerKind::LASP,
    SchedulerKind::LYNX, SchedulerKind::SAS,  SchedulerKind::OMFNN};

inline const char* to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::FCFS: return "FCFS";
    case SchedulerKind::LAS: return "LAS";
    case SchedulerKind::LASP: return "LASP";
    case SchedulerKind::LYNX: return "LYNX";
    case SchedulerKind::SAS: return "SAS";
    case SchedulerKind::OMFNN: return "OMFNN";
  }
  throw unsupported_policy("unknown scheduler kind");
}

inline SchedulerKind scheduler_from_string(const std::string& s) {
  for (auto k : kAllSchedulers)
    if (s == to_string(k)) return k;
  throw unsupported_policy("unknown scheduler: " + s);
}

constexpr double kBaseFreqHz = 2.1e9;
constexpr double kBaseUtilization = 0.8;
inline constexpr std::array<double, 5> kReductionGrid = {0.0, 0.05, 0.10, 0.15, 0.20};

struct WorkflowSpec {
  std::string id;            // WF-1 .. WF-5
  std::string description;
  std::size_t task_count = 0;
  std::string resource_level;  // Mid/Low, Mid, High
  double base_task_ms = 1.0;
  double cpu_fraction = 0.5;
  double mem_fraction = 0.25;
  double io_fraction = 0.25;
};

inline const std::vector<WorkflowSpec>& canonical_workflows() {
  static const std::vector<WorkflowSpec> wfs = {
      {"WF-1", "Event Reconstruction", 500, "Mid/Low", 1.0, 0.50, 0.25, 0.25},
      {"WF-2", "Identifying Particle Trajectories", 600, "Mid", 1.0, 0.50, 0.30, 0.20},
      {"WF-3", "Identifying Collision Points", 750, "Mid", 1.0, 0.45, 0.30, 0.25},
      {"WF-4", "Pattern Recognition", 800, "High", 1.0, 0.55, 0.30, 0.15},
      {"WF-5", "Anomaly Detection", 900, "High", 1.0, 0.55, 0.25, 0.20},
  };
  return wfs;
}

inline const WorkflowSpec& workflow_by_id(const std::string& id) {
  for (const auto& w : canonical_workflows())
    if (w.id == id) return w;
  throw invalid_input("unknown workflow: " + id);
}

struct FrequencyConfig {
  double base_freq_hz = kBaseFreqHz;
  double reduction = 0.0;            // one of kReductionGrid
  double utilization = kBaseUtilization;
};

// Policy surrogate parameters; each scheduler is modeled as a parameterized
// discrete-event policy calibrated against the bundled metric tables.
// energy_unit_scale converts W*ms into the tables' printed kWh column and
// absorbs their unit scale.
struct SchedulerPolicyParams {
  double locality_hit_prob = 0.0;
  double prefetch_overlap = 0.0;
  double speculative_dup_rate = 0.0;
  double base_cpu_boost = 1.0;
  double power_multiplier = 1.0;
  double energy_unit_scale = 2.7778e-10;  // ms*W -> kWh when uncalibrated
  double tat_sensitivity = 0.0;           // k_t
  double energy_sensitivity = 0.0;        // k_e
};

struct ExecutionTrace {
  SchedulerKind scheduler = SchedulerKind::FCFS;
  std::string workflow;
  std::size_t tasks = 0;
  double tat_ms = 0.0;
  double avg_power_w = 0.0;
  double energy_kwh = 0.0;
  double effective_freq_ghz = kBaseFreqHz / 1e9;
  double utilization = kBaseUtilization;
};

inline constexpr const char* kTraceCsvHeader =
    "scheduler,workflow,tasks,tat_ms,power_w,energy_kwh";

inline std::string format2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string trace_csv_row(const ExecutionTrace& t) {
  std::ostringstream os;
  os << to_string(t.scheduler) << ',' << t.workflow << ',' << t.tasks << ','
     << format2(t.tat_ms) << ',' << format2(t.avg_power_w) << ','
     << format2(t.energy_kwh);
  return os.str();
}

struct TableLoadResult {
  std::vector<ExecutionTrace> traces;
  std::string header;
  bool empty_warning = false;
};

inline TableLoadResult load_table(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw invalid_input("cannot open " + csv_path);
  TableLoadResult result;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    result.empty_warning = true;
    return result;
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader)
    throw parse_error("unexpected header '" + line + "'", lineno);
  result.header = line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw parse_error("expected 6 fields", lineno);
    ExecutionTrace t;
    try {
      t.scheduler = scheduler_from_string(fields[0]);
      t.workflow = fields[1];
      t.tasks = static_cast<std::size_t>(std::stoul(fields[2]));
      t.tat_ms = std::stod(fields[3]);
      t.avg_power_w = std::stod(fields[4]);
      t.energy_kwh = std::stod(fields[5]);
    } catch (const unsupported_policy& e) {
      throw parse_error(e.what(), lineno);
    } catch (const std::exception&) {
      throw parse_error("malformed row", lineno);
    }
    if (t.tat_ms <= 0.0 || t.energy_kwh <= 0.0 || t.avg_power_w <= 0.0)
      throw validation_error("non-positive metric at line " + std::to_string(lineno));
    result.traces.push_back(t);
  }
  if (result.traces.empty()) result.empty_warning = true;
  return result;
}

// Table 4 layout: base TAT plus 15%/10% TAT and energy columns.
struct ReductionTargets {
  SchedulerKind scheduler = SchedulerKind::FCFS;
  std::string workflow;
  double tat_base_ms = 0.0;
  double tat_15_ms = 0.0;
  double tat_10_ms = 0.0;
  double energy_15_kwh = 0.0;
  double energy_10_kwh = 0.0;
};

inline constexpr const char* kReductionCsvHeader =
    "scheduler,workflow,tat_base_ms,tat_15_ms,tat_10_ms,energy_15_kwh,energy_10_kwh";

inline std::vector<ReductionTargets> load_reduction_table(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw invalid_input("cannot open " + csv_path);
  std::vector<ReductionTargets> rows;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) return rows;
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReductionCsvHeader)
    throw parse_error("unexpected header '" + line + "'", lineno);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw parse_error("expected 7 fields", lineno);
    ReductionTargets r;
    try {
      r.scheduler = scheduler_from_string(fields[0]);
      r.workflow = fields[1];
      r.tat_base_ms = std::stod(fields[2]);
      r.tat_15_ms = std::stod(fields[3]);
      r.tat_10_ms = std::stod(fields[4]);
      r.energy_15_kwh = std::stod(fields[5]);
      r.energy_10_kwh = std::stod(fields[6]);
    } catch (const std::exception&) {
      throw parse_error("malformed row", lineno);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace greenflow
