#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wander/pano.hpp"
#include "wander/planner.hpp"

namespace wander {

/// Percent correctness of judge scores in {1..5}: 100 * mean((s - 1) / 4).
/// Throws EmptySet, ValidationError.
double correctness(std::span<const int> scores);

/// Pairwise (cascade) summation, independent of thread count.
double pairwise_sum(std::span<const double> values);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Per-pixel SSIM map (channel-averaged). Windows wrap in longitude and
/// clamp in latitude. Throws DimensionMismatch.
template <typename T>
Image<double> ssim_map(const Image<T>& a, const Image<T>& b, double dynamic_range, const SsimParams& params = {});

/// SSIM averaged with cos(latitude) row weights.
template <typename T>
double spherical_ssim(const Image<T>& a, const Image<T>& b, double dynamic_range, const SsimParams& params = {});

/// Full-scale value of an integer pixel type (255 or 65535).
template <typename T>
constexpr double default_dynamic_range() {
  return static_cast<double>(std::numeric_limits<T>::max());
}

/// Fractional ranks (ties share the average of their positions), 1-based.
std::vector<double> average_ranks(std::span<const double> values);

/// Rank correlation. Throws LengthMismatch, DegenerateInput.
double spearman(std::span<const double> x, std::span<const double> y);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);
/// Throws EmptySet.
MeanStd trajectory_stats(std::span<const Trajectory> trajectories);

struct MetricRow {
  std::string item;
  std::optional<double> fvd;
  std::optional<double> end_fid;
  std::optional<double> s_ssim;
  std::optional<double> lpips;
  std::optional<double> qa;
};

/// CSV with '#' comment lines first, then item,FVD,End-FID,S-SSIM,LPIPS,QA.
std::string format_metric_report(const std::vector<std::string>& comments, const std::vector<MetricRow>& rows);

/// Reads an item-keyed CSV with any of the report columns; missing cells
/// stay empty.
std::vector<MetricRow> parse_metric_csv(const std::string& text);

}  // namespace wander
