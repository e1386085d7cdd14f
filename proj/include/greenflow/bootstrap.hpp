#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "greenflow/errors.hpp"
#include "greenflow/rng.hpp"

namespace greenflow {

// Bootstrap resampling of the difference in means between real and synthetic
// metrics. Both samples are normalized by the real sample's mean and
// standard deviation before resampling; the raw-unit observed difference is
// reported alongside for interpretability.

struct BootstrapConfig {
  std::size_t b_samples = 10000;
  double confidence_level = 0.95;
  std::uint64_t seed = 1;
  // Resample matched indices when the two samples pair up row-for-row
  // (same experiment under two conditions); requires equal lengths.
  bool paired = false;
};

struct BootstrapResult {
  double observed_diff_raw = 0.0;
  double observed_diff_normalized = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  std::vector<double> diffs;  // the B resampled (normalized) differences
};

// Linear interpolation between order statistics; sample must be sorted.
inline double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw invalid_input("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw invalid_parameter("quantile: p outside [0,1]");
  if (sorted.size() == 1) return sorted[0];
  double h = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(const std::vector<double>& sorted, double p) {
  return quantile(std::span<const double>(sorted), p);
}

namespace detail {

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(std::span<const double> v, double m) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace detail

inline BootstrapResult bootstrap_diff_means(std::span<const double> real,
                                            std::span<const double> synth,
                                            const BootstrapConfig& cfg) {
  if (real.empty() || synth.empty())
    throw invalid_input("bootstrap_diff_means: empty sample");
  if (cfg.b_samples < 100) throw invalid_parameter("bootstrap_diff_means: b_samples < 100");
  if (cfg.confidence_level <= 0.0 || cfg.confidence_level >= 1.0)
    throw invalid_parameter("bootstrap_diff_means: confidence level outside (0,1)");
  if (cfg.paired && real.size() != synth.size())
    throw invalid_input("bootstrap_diff_means: paired mode needs equal lengths");

  double mean_r = detail::mean(real);
  double std_r = detail::sample_std(real, mean_r);
  if (std_r == 0.0)
    throw normalization_error("bootstrap_diff_means: real sample has zero std");

  std::vector<double> rn(real.size()), sn(synth.size());
  for (std::size_t i = 0; i < real.size(); ++i) rn[i] = (real[i] - mean_r) / std_r;
  for (std::size_t i = 0; i < synth.size(); ++i) sn[i] = (synth[i] - mean_r) / std_r;

  BootstrapResult result;
  result.observed_diff_raw = mean_r - detail::mean(synth);
  result.observed_diff_normalized = result.observed_diff_raw / std_r;

  Rng rng = Rng::substream(cfg.seed, "bootstrap");
  result.diffs.resize(cfg.b_samples);
  for (std::size_t b = 0; b < cfg.b_samples; ++b) {
    double sum_r = 0.0, sum_s = 0.0;
    if (cfg.paired) {
      for (std::size_t i = 0; i < rn.size(); ++i) {
        std::size_t j = rng.index(rn.size());
        sum_r += rn[j];
        sum_s += sn[j];
      }
      result.diffs[b] = (sum_r - sum_s) / static_cast<double>(rn.size());
    } else {
      for (std::size_t i = 0; i < rn.size(); ++i) sum_r += rn[rng.index(rn.size())];
      for (std::size_t i = 0; i < sn.size(); ++i) sum_s += sn[rng.index(sn.size())];
      result.diffs[b] = sum_r / static_cast<double>(rn.size()) -
                        sum_s / static_cast<double>(sn.size());
    }
  }

  std::vector<double> sorted = result.diffs;
  std::sort(sorted.begin(), sorted.end());
  double alpha = 1.0 - cfg.confidence_level;
  result.ci_low = quantile(sorted, alpha / 2.0);
  result.ci_high = quantile(sorted, 1.0 - alpha / 2.0);

  std::size_t n_le = 0, n_ge = 0;
  for (double d : result.diffs) {
    if (d <= 0.0) ++n_le;
    if (d >= 0.0) ++n_ge;
  }
  double frac_le = static_cast<double>(n_le) / static_cast<double>(cfg.b_samples);
  double frac_ge = static_cast<double>(n_ge) / static_cast<double>(cfg.b_samples);
  result.p_value = std::clamp(2.0 * std::min(frac_le, frac_ge), 0.0, 1.0);
  return result;
}

inline BootstrapResult bootstrap_diff_means(const std::vector<double>& real,
                                            const std::vector<double>& synth,
                                            const BootstrapConfig& cfg) {
  return bootstrap_diff_means(std::span<const double>(real), std::span<const double>(synth), cfg);
}

}  // namespace greenflow
