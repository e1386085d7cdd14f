#pragma once

#include <cmath>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "greenflow/errors.hpp"

namespace greenflow {

// Component-wise power model: CPU dynamic/static, DRAM activity/refresh/idle,
// I/O active/idle, cooling, and trapezoidal time-integration of total power.

struct CpuElectrical {
  double switching_capacitance_f = 3.6e-7;
  double supply_voltage_v = 1.2;
  double clock_frequency_hz = 2.1e9;
  double leakage_ref_current_a = 30.0;
  double leakage_temp_coeff_per_k = 0.01;
  double leakage_ref_temp_k = 318.0;
};

struct MemoryActivity {
  double n_reads = 0.0;
  double n_writes = 0.0;
  double energy_per_read_j = 0.0;
  double energy_per_write_j = 0.0;
  double refresh_frequency_hz = 64e3;
  double energy_per_refresh_at_ref_j = 1e-7;
  double refresh_temp_coeff_per_k = 0.005;
  double refresh_ref_temp_k = 318.0;
  double idle_leakage_current_a = 0.0;
};

struct IoActivity {
  double transfer_rate_bps = 0.0;   // bytes per second
  double energy_per_byte_j = 0.0;
  double idle_power_w = 0.0;
  double t_total_s = 0.0;
  double t_active_s = 0.0;
};

struct PowerBreakdown {
  double dynamic_w = 0.0;
  double static_w = 0.0;
  double memory_dynamic_w = 0.0;
  double memory_refresh_w = 0.0;
  double memory_idle_w = 0.0;
  double io_active_w = 0.0;
  double io_idle_w = 0.0;
  double cooling_w = 0.0;

  // Fixed left-to-right summation order; total() is bit-exact against the
  // same order everywhere it is checked.
  double total() const {
    return dynamic_w + static_w + memory_dynamic_w + memory_refresh_w +
           memory_idle_w + io_active_w + io_idle_w + cooling_w;
  }
};

struct EnergyResult {
  double joules = 0.0;
  double kwh = 0.0;
};

inline double dynamic_power(const CpuElectrical& elec, double effective_freq_hz) {
  if (effective_freq_hz <= 0.0) throw invalid_parameter("dynamic_power: frequency must be > 0");
  if (elec.supply_voltage_v <= 0.0) throw invalid_parameter("dynamic_power: voltage must be > 0");
  if (elec.switching_capacitance_f < 0.0)
    throw invalid_parameter("dynamic_power: capacitance must be >= 0");
  return elec.switching_capacitance_f * elec.supply_voltage_v * elec.supply_voltage_v *
         effective_freq_hz;
}

// I_leakage(T) = I_ref * exp(k * (T - T_ref))
inline double static_power(const CpuElectrical& elec, double temperature_k) {
  if (temperature_k <= 0.0) throw invalid_parameter("static_power: temperature must be > 0 K");
  double i_leak = elec.leakage_ref_current_a *
                  std::exp(elec.leakage_temp_coeff_per_k *
                           (temperature_k - elec.leakage_ref_temp_k));
  return i_leak * elec.supply_voltage_v;
}

// -> (memory_dynamic_w, memory_refresh_w, memory_idle_w)
inline std::tuple<double, double, double> memory_power(const MemoryActivity& mem,
                                                       double temperature_k,
                                                       double supply_voltage_v,
                                                       double window_s) {
  if (window_s <= 0.0) throw invalid_parameter("memory_power: window must be > 0");
  double dynamic = (mem.n_reads * mem.energy_per_read_j +
                    mem.n_writes * mem.energy_per_write_j) /
                   window_s;
  double e_refresh = mem.energy_per_refresh_at_ref_j *
                     (1.0 + mem.refresh_temp_coeff_per_k *
                                (temperature_k - mem.refresh_ref_temp_k));
  double refresh = mem.refresh_frequency_hz * e_refresh;
  double idle = mem.idle_leakage_current_a * supply_voltage_v;
  return {dynamic, refresh, idle};
}

// -> (io_active_w, io_idle_w). Idle energy over the window is reported as
// average watts over t_total so the breakdown stays a rate.
inline std::pair<double, double> io_power(const IoActivity& io) {
  if (io.t_active_s > io.t_total_s)
    throw invalid_parameter("io_power: t_active exceeds t_total");
  if (io.t_active_s < 0.0 || io.transfer_rate_bps < 0.0)
    throw invalid_parameter("io_power: negative activity");
  double active = io.transfer_rate_bps * io.energy_per_byte_j;
  double idle = 0.0;
  if (io.t_total_s > 0.0)
    idle = io.idle_power_w * (io.t_total_s - io.t_active_s) / io.t_total_s;
  return {active, idle};
}

inline double cooling_power(double q_removed_w, double efficiency) {
  if (efficiency <= 0.0 || efficiency > 1.0)
    throw invalid_parameter("cooling_power: efficiency must be in (0,1]");
  if (q_removed_w < 0.0) throw invalid_parameter("cooling_power: q_removed must be >= 0");
  return q_removed_w / efficiency;
}

struct PowerSample {
  double t_s;
  double p_total_w;
};

// Trapezoidal integral; exact on piecewise-linear traces.
inline EnergyResult integrate_energy(std::span<const PowerSample> samples) {
  if (samples.size() < 2) throw invalid_input("integrate_energy: need at least 2 samples");
  double joules = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t_s <= samples[i - 1].t_s)
      throw invalid_input("integrate_energy: timestamps must be strictly increasing");
    joules += 0.5 * (samples[i].p_total_w + samples[i - 1].p_total_w) *
              (samples[i].t_s - samples[i - 1].t_s);
  }
  return {joules, joules / 3.6e6};
}

inline EnergyResult integrate_energy(const std::vector<PowerSample>& samples) {
  return integrate_energy(std::span<const PowerSample>(samples));
}

}  // namespace greenflow
