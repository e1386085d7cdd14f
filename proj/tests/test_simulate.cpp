#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "greenflow/simulate.hpp"

using namespace greenflow;

namespace {

SchedulerPolicyParams params_with_sensitivities(SchedulerKind k) {
  SchedulerPolicyParams p = default_policy_params(k);
  p.tat_sensitivity = 0.4;
  p.energy_sensitivity = 0.6;
  return p;
}

}  // namespace

TEST_CASE("simulation is deterministic for a fixed seed") {
  const WorkflowSpec& wf = workflow_by_id("WF-2");
  SchedulerPolicyParams p = default_policy_params(SchedulerKind::LAS);
  ExecutionTrace a = simulate(wf, SchedulerKind::LAS, FrequencyConfig{}, p, 7);
  ExecutionTrace b = simulate(wf, SchedulerKind::LAS, FrequencyConfig{}, p, 7);
  CHECK(a.tat_ms == b.tat_ms);
  CHECK(a.avg_power_w == b.avg_power_w);
  CHECK(a.energy_kwh == b.energy_kwh);
  ExecutionTrace c = simulate(wf, SchedulerKind::LAS, FrequencyConfig{}, p, 8);
  CHECK(a.tat_ms != c.tat_ms);
}

TEST_CASE("zero-task workflow produces an idle-free zero trace") {
  WorkflowSpec wf = workflow_by_id("WF-1");
  wf.task_count = 0;
  ExecutionTrace t = simulate(wf, SchedulerKind::FCFS, FrequencyConfig{},
                              default_policy_params(SchedulerKind::FCFS), 1);
  CHECK(t.tat_ms == 0.0);
  CHECK(t.energy_kwh == 0.0);
  CHECK(t.avg_power_w == 0.0);
}

TEST_CASE("utilization outside (0,1] is rejected") {
  FrequencyConfig f;
  f.utilization = 0.0;
  CHECK_THROWS_AS(simulate(workflow_by_id("WF-1"), SchedulerKind::FCFS, f,
                           default_policy_params(SchedulerKind::FCFS), 1),
                  invalid_parameter);
}

TEST_CASE("locality hits make LAS faster than FCFS before calibration") {
  const WorkflowSpec& wf = workflow_by_id("WF-3");
  ExecutionTrace fcfs = simulate(wf, SchedulerKind::FCFS, FrequencyConfig{},
                                 default_policy_params(SchedulerKind::FCFS), 3);
  ExecutionTrace las = simulate(wf, SchedulerKind::LAS, FrequencyConfig{},
                                default_policy_params(SchedulerKind::LAS), 3);
  CHECK(las.tat_ms < fcfs.tat_ms);
}

TEST_CASE("speculative duplicates never reduce energy") {
  const WorkflowSpec& wf = workflow_by_id("WF-4");
  SchedulerPolicyParams with_dup = default_policy_params(SchedulerKind::SAS);
  SchedulerPolicyParams no_dup = with_dup;
  no_dup.speculative_dup_rate = 0.0;
  SimulationDetail d_with, d_without;
  simulate(wf, SchedulerKind::SAS, FrequencyConfig{}, with_dup, 5, HardwareModel(), &d_with);
  simulate(wf, SchedulerKind::SAS, FrequencyConfig{}, no_dup, 5, HardwareModel(), &d_without);
  CHECK(d_with.raw_joules >= d_without.raw_joules);
  CHECK(d_with.duplicate_ms > 0.0);
  CHECK(d_without.duplicate_ms == 0.0);
}

TEST_CASE("reduction grid membership is enforced") {
  ExecutionTrace base;
  base.tat_ms = 100.0;
  base.energy_kwh = 10.0;
  base.avg_power_w = 500.0;
  SchedulerPolicyParams p = params_with_sensitivities(SchedulerKind::FCFS);
  CHECK_THROWS_AS(apply_frequency_reduction(base, 0.07, p), greenflow::range_error);
  CHECK_THROWS_AS(apply_frequency_reduction(base, 0.25, p), greenflow::range_error);
  CHECK_NOTHROW(apply_frequency_reduction(base, 0.10, p));
}

TEST_CASE("zero reduction is the identity") {
  ExecutionTrace base;
  base.tat_ms = 123.0;
  base.energy_kwh = 45.0;
  base.avg_power_w = 700.0;
  SchedulerPolicyParams p = params_with_sensitivities(SchedulerKind::LAS);
  ExecutionTrace same = apply_frequency_reduction(base, 0.0, p);
  CHECK(same.tat_ms == base.tat_ms);
  CHECK(same.energy_kwh == base.energy_kwh);
  CHECK(same.avg_power_w == base.avg_power_w);
}

TEST_CASE("reduction monotonicity: TAT grows, energy falls along the grid") {
  ExecutionTrace base;
  base.tat_ms = 800.0;
  base.energy_kwh = 50.0;
  base.avg_power_w = 1000.0;
  SchedulerPolicyParams p = params_with_sensitivities(SchedulerKind::LYNX);
  double prev_tat = base.tat_ms;
  double prev_e = base.energy_kwh;
  for (double r : {0.05, 0.10, 0.15, 0.20}) {
    ExecutionTrace t = apply_frequency_reduction(base, r, p);
    CHECK(t.tat_ms > prev_tat);
    CHECK(t.energy_kwh < prev_e);
    prev_tat = t.tat_ms;
    prev_e = t.energy_kwh;
  }
}

TEST_CASE("reduced trace inverts back to the base trace exactly") {
  ExecutionTrace base;
  base.tat_ms = 650.0;
  base.energy_kwh = 33.0;
  base.avg_power_w = 900.0;
  base.effective_freq_ghz = 2.1;
  SchedulerPolicyParams p = params_with_sensitivities(SchedulerKind::SAS);
  for (double r : {0.05, 0.10, 0.15, 0.20}) {
    ExecutionTrace t = apply_frequency_reduction(base, r, p);
    // the affine model is invertible in closed form
    double tat_back = t.tat_ms / (1.0 + p.tat_sensitivity * tat_shape(r) * r);
    double e_back = t.energy_kwh / (1.0 - p.energy_sensitivity * energy_shape(r) * r);
    CHECK(tat_back == doctest::Approx(base.tat_ms).epsilon(1e-12));
    CHECK(e_back == doctest::Approx(base.energy_kwh).epsilon(1e-12));
    CHECK(t.effective_freq_ghz == doctest::Approx(base.effective_freq_ghz * (1.0 - r)));
  }
}

TEST_CASE("reduced power stays consistent with energy over TAT") {
  ExecutionTrace base;
  base.tat_ms = 500.0;
  base.energy_kwh = 20.0;
  SchedulerPolicyParams p = params_with_sensitivities(SchedulerKind::LASP);
  p.energy_unit_scale = 2e-6;
  base.avg_power_w = base.energy_kwh / (base.tat_ms * p.energy_unit_scale);
  ExecutionTrace t = apply_frequency_reduction(base, 0.15, p);
  CHECK(t.avg_power_w ==
        doctest::Approx(t.energy_kwh / (t.tat_ms * p.energy_unit_scale)).epsilon(1e-12));
}

TEST_CASE("power trace from the simulator integrates to its own energy") {
  SimulationDetail d;
  const WorkflowSpec& wf = workflow_by_id("WF-5");
  SchedulerPolicyParams p = default_policy_params(SchedulerKind::FCFS);
  ExecutionTrace t = simulate(wf, SchedulerKind::FCFS, FrequencyConfig{}, p, 2,
                              HardwareModel(), &d);
  REQUIRE(d.power_trace.size() >= 2);
  EnergyResult e = integrate_energy(d.power_trace);
  CHECK(d.raw_joules == doctest::Approx(e.joules).epsilon(1e-9));
  CHECK(t.tat_ms > 0.0);
  // thermal trace is aligned with the power trace timestamps
  REQUIRE(d.thermal_trace.size() == d.power_trace.size());
  for (std::size_t i = 0; i < d.thermal_trace.size(); ++i)
    CHECK(d.thermal_trace[i].t_s == doctest::Approx(d.power_trace[i].t_s));
}
