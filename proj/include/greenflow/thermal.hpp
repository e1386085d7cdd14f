#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "greenflow/errors.hpp"

namespace greenflow {

// Desk-scale stand-in for the CFD stage: a 1-D explicit finite-difference
// solver of the advective heat equation for physics validation, plus a lumped
// RC node for fast in-loop use. Both feed the leakage/refresh terms and the
// Q_removed input to cooling.

struct ThermalMaterial {
  double density_kg_m3 = 2330.0;       // silicon
  double specific_heat_j_kgk = 700.0;
  double conductivity_w_mk = 150.0;
};

struct ThermalGrid1D {
  std::size_t n_cells = 0;
  double dx_m = 0.0;
  std::vector<double> temperatures_k;
  double velocity_m_s = 0.0;  // uniform advection
  double ambient_k = 295.0;
};

struct ThermalLimits {
  double max_core_temp_k = 600.0;
  double max_power_w = 5000.0;
};

struct LumpedNode {
  double thermal_resistance_k_w = 0.07;
  double thermal_capacitance_j_k = 400.0;
  double ambient_k = 295.0;
};

// One explicit step: central-difference diffusion, first-order upwind
// advection, source Q/(rho*c_p). Boundary cells held at ambient (Dirichlet,
// forced-air inlet). Refuses dt outside the stability bounds.
inline ThermalGrid1D step_heat_equation(const ThermalGrid1D& grid,
                                        const ThermalMaterial& mat,
                                        std::span<const double> source_w_m3,
                                        double dt_s) {
  if (grid.n_cells < 3 || grid.dx_m <= 0.0 ||
      grid.temperatures_k.size() != grid.n_cells)
    throw invalid_parameter("step_heat_equation: malformed grid");
  if (source_w_m3.size() != grid.n_cells)
    throw invalid_parameter("step_heat_equation: source size mismatch");
  double alpha = mat.conductivity_w_mk / (mat.density_kg_m3 * mat.specific_heat_j_kgk);
  double dt_diff = 0.5 * grid.dx_m * grid.dx_m / alpha;
  if (dt_s <= 0.0 || dt_s > dt_diff)
    throw stability_error("step_heat_equation: dt violates diffusive bound");
  if (grid.velocity_m_s != 0.0 && dt_s > grid.dx_m / std::abs(grid.velocity_m_s))
    throw stability_error("step_heat_equation: dt violates advective bound");

  ThermalGrid1D out = grid;
  const auto& T = grid.temperatures_k;
  double inv_dx2 = 1.0 / (grid.dx_m * grid.dx_m);
  double rc = mat.density_kg_m3 * mat.specific_heat_j_kgk;
  for (std::size_t i = 1; i + 1 < grid.n_cells; ++i) {
    double diff = alpha * (T[i + 1] - 2.0 * T[i] + T[i - 1]) * inv_dx2;
    double adv = 0.0;
    if (grid.velocity_m_s > 0.0)
      adv = grid.velocity_m_s * (T[i] - T[i - 1]) / grid.dx_m;
    else if (grid.velocity_m_s < 0.0)
      adv = grid.velocity_m_s * (T[i + 1] - T[i]) / grid.dx_m;
    out.temperatures_k[i] = T[i] + dt_s * (diff - adv + source_w_m3[i] / rc);
  }
  out.temperatures_k.front() = grid.ambient_k;
  out.temperatures_k.back() = grid.ambient_k;
  return out;
}

inline double steady_state_lumped(const LumpedNode& node, double q_in_w) {
  if (q_in_w < 0.0) throw invalid_parameter("steady_state_lumped: q_in must be >= 0");
  return node.ambient_k + q_in_w * node.thermal_resistance_k_w;
}

struct ThermalPoint {
  double t_s;
  double temp_k;
  double q_removed_w;
};

// Integrates C*dT/dt = Q(t) - (T - ambient)/R with explicit substeps between
// samples (Q held at the left sample). Output aligned with input timestamps.
inline std::vector<ThermalPoint> thermal_profile(
    std::span<const std::pair<double, double>> power_trace, const LumpedNode& node) {
  std::vector<ThermalPoint> out;
  if (power_trace.empty()) return out;
  double tau = node.thermal_resistance_k_w * node.thermal_capacitance_j_k;
  double temp = node.ambient_k;
  auto q_removed = [&](double T) {
    return (T - node.ambient_k) / node.thermal_resistance_k_w;
  };
  out.push_back({power_trace[0].first, temp, q_removed(temp)});
  for (std::size_t i = 1; i < power_trace.size(); ++i) {
    double dt = power_trace[i].first - power_trace[i - 1].first;
    if (dt <= 0.0) throw invalid_input("thermal_profile: timestamps must be strictly increasing");
    double q = power_trace[i - 1].second;
    // substep to keep the explicit update stable and accurate
    std::size_t n_sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / (0.05 * tau))));
    double h = dt / static_cast<double>(n_sub);
    for (std::size_t s = 0; s < n_sub; ++s) {
      double dTdt = (q - q_removed(temp)) / node.thermal_capacitance_j_k;
      temp += h * dTdt;
    }
    out.push_back({power_trace[i].first, temp, q_removed(temp)});
  }
  return out;
}

inline bool check_thermal_feasibility(double peak_power_w, const ThermalLimits& limits,
                                      const LumpedNode& node) {
  if (peak_power_w < 0.0) throw invalid_parameter("check_thermal_feasibility: negative power");
  if (peak_power_w > limits.max_power_w) return false;
  return steady_state_lumped(node, peak_power_w) <= limits.max_core_temp_k;
}

inline double cfd_penalty(double predicted_energy, double constraint_energy) {
  return std::abs(constraint_energy - predicted_energy);
}

}  // namespace greenflow
