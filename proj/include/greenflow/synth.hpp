#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "greenflow/preprocess.hpp"
#include "greenflow/rng.hpp"
#include "greenflow/thermal.hpp"
#include "greenflow/trace.hpp"
#include "greenflow/vae.hpp"

namespace greenflow {

struct SyntheticRecord {
  SchedulerKind scheduler = SchedulerKind::FCFS;
  std::string workflow;
  double reduction = 0.0;
  double tat_ms = 0.0;
  double power_w = 0.0;
  double energy_kwh = 0.0;
  bool accepted = false;
  std::string rejection_reason;  // empty when accepted
};

constexpr double kReductionGateLow = 0.05;
constexpr double kReductionGateHigh = 0.20;
constexpr std::size_t kDrawBudgetFactor = 20;

inline bool reduction_in_gate(double r) {
  return r >= kReductionGateLow - 1e-12 && r <= kReductionGateHigh + 1e-12;
}

inline SyntheticRecord record_from_decoded(const DecodedSample& d) {
  SyntheticRecord rec;
  rec.scheduler = scheduler_from_string(d.scheduler);
  rec.workflow = d.workflow;
  rec.tat_ms = d.numerics[numeric_index("tat_ms")];
  rec.power_w = d.numerics[numeric_index("power_w")];
  rec.energy_kwh = d.numerics[numeric_index("energy_kwh")];
  rec.reduction = d.numerics[numeric_index("reduction")];
  return rec;
}

// Draws latent samples, decodes, inverts to physical units, and applies the
// acceptance gates: the 5-20% operational-reduction window and the thermal
// feasibility predicate. Emits rejected records too, with reasons. Stops at
// n accepted or when the draw budget (20n) exhausts, in which case it raises
// a starvation error.
inline std::vector<SyntheticRecord> generate(const VaeParams& params, const FeatureSchema& schema,
                                             std::size_t n, const ThermalLimits& limits,
                                             const LumpedNode& node, std::uint64_t seed) {
  std::vector<SyntheticRecord> records;
  Rng rng = Rng::substream(seed, "generate");
  std::size_t accepted = 0;
  std::size_t budget = n * kDrawBudgetFactor;
  for (std::size_t drawn = 0; drawn < budget && accepted < n; ++drawn) {
    std::vector<double> z(params.latent_dim);
    for (auto& v : z) v = rng.normal();
    std::vector<double> xhat = decode(z, params);
    SyntheticRecord rec = record_from_decoded(invert(xhat, schema));
    if (!reduction_in_gate(rec.reduction)) {
      rec.rejection_reason = "reduction outside 5-20% gate";
    } else if (!check_thermal_feasibility(std::max(0.0, rec.power_w), limits, node)) {
      rec.rejection_reason = "thermal limits violated";
    } else {
      rec.accepted = true;
      ++accepted;
    }
    records.push_back(std::move(rec));
  }
  if (accepted < n)
    throw generation_starvation("generate: acceptance rate below 1/" +
                                    std::to_string(kDrawBudgetFactor),
                                accepted, records.size());
  return records;
}

// --- validation of a generated batch (constraint check, cross-scheduler
// consistency, outlier rejection) ---

struct RecordValidation {
  bool constraint_ok = false;      // V: power/thermal thresholds + gate
  bool cross_consistent = false;   // C: inside the scheduler's calibrated envelope
  bool outlier = false;            // D: "ExpertReview", realized as robust z > 4
  bool acceptable = false;
};

struct ValidationReport {
  std::vector<RecordValidation> per_record;
  std::size_t n_acceptable = 0;
  std::string outlier_rule = "ExpertReview (robust z-score > 4)";
};

inline bool acceptable(bool v, bool c, bool d) { return v && c && !d; }

namespace detail {

struct Point2 {
  double x, y;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain; returns the hull in counter-clockwise order.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  std::size_t lower = hull.size() + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  return hull;
}

inline bool inside_hull(const std::vector<Point2>& hull, const Point2& p) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return hull[0].x == p.x && hull[0].y == p.y;
  if (hull.size() == 2) {
    // degenerate: on-segment check with small slack
    double c = cross(hull[0], hull[1], p);
    double len = std::hypot(hull[1].x - hull[0].x, hull[1].y - hull[0].y);
    if (std::abs(c) > 1e-9 * std::max(1.0, len)) return false;
    return p.x >= std::min(hull[0].x, hull[1].x) - 1e-12 &&
           p.x <= std::max(hull[0].x, hull[1].x) + 1e-12;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0.0) return false;
  }
  return true;
}

}  // namespace detail

// Reference envelope per scheduler: the calibrated model's (TAT, energy)
// predictions across workflows and reductions.
struct SchedulerEnvelope {
  SchedulerKind scheduler;
  std::vector<std::pair<double, double>> points;  // (tat_ms, energy_kwh)
};

// C(Y,S): record lies within the convex hull of the scheduler's calibrated
// predictions, with a relative tolerance applied by shrinking the point
// toward the hull centroid.
inline bool cross_scheduler_consistent(const SyntheticRecord& rec,
                                       const std::vector<SchedulerEnvelope>& envelopes,
                                       double tolerance) {
  for (const auto& env : envelopes) {
    if (env.scheduler != rec.scheduler) continue;
    std::vector<detail::Point2> pts;
    for (auto [t, e] : env.points) pts.push_back({t, e});
    auto hull = detail::convex_hull(pts);
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
      cx += p.x;
      cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    double shrink = 1.0 / (1.0 + tolerance);
    detail::Point2 probe{cx + (rec.tat_ms - cx) * shrink, cy + (rec.energy_kwh - cy) * shrink};
    return detail::inside_hull(hull, probe) ||
           detail::inside_hull(hull, {rec.tat_ms, rec.energy_kwh});
  }
  return false;
}

inline double robust_z(double v, std::vector<double> column) {
  std::sort(column.begin(), column.end());
  auto median = [](const std::vector<double>& s) {
    std::size_t n = s.size();
    return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  };
  double med = median(column);
  std::vector<double> dev;
  dev.reserve(column.size());
  for (double x : column) dev.push_back(std::abs(x - med));
  std::sort(dev.begin(), dev.end());
  double mad = median(dev);
  double scale = 1.4826 * mad;
  if (scale <= 0.0) return v == med ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(v - med) / scale;
}

inline ValidationReport validate_batch(const std::vector<SyntheticRecord>& records,
                                       const std::vector<ExecutionTrace>& real_traces,
                                       const std::vector<SchedulerEnvelope>& envelopes,
                                       const ThermalLimits& limits, const LumpedNode& node,
                                       double hull_tolerance = 0.10,
                                       double z_threshold = 4.0) {
  if (records.empty()) throw invalid_input("validate_batch: empty records");
  std::vector<double> tat_col, power_col, energy_col;
  for (const auto& t : real_traces) {
    tat_col.push_back(t.tat_ms);
    power_col.push_back(t.avg_power_w);
    energy_col.push_back(t.energy_kwh);
  }
  ValidationReport report;
  for (const auto& rec : records) {
    RecordValidation rv;
    rv.constraint_ok = reduction_in_gate(rec.reduction) && rec.power_w >= 0.0 &&
                       check_thermal_feasibility(rec.power_w, limits, node);
    rv.cross_consistent = cross_scheduler_consistent(rec, envelopes, hull_tolerance);
    rv.outlier = robust_z(rec.tat_ms, tat_col) > z_threshold ||
                 robust_z(rec.power_w, power_col) > z_threshold ||
                 robust_z(rec.energy_kwh, energy_col) > z_threshold;
    rv.acceptable = acceptable(rv.constraint_ok, rv.cross_consistent, rv.outlier);
    if (rv.acceptable) ++report.n_acceptable;
    report.per_record.push_back(rv);
  }
  return report;
}

}  // namespace greenflow
