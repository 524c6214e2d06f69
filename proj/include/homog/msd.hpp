#pragma once

#include "homog/graph.hpp"
#include "homog/reflecting_walk.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace homog {

enum class FitWeighting { Ordinary, InverseVariance };

struct MsdOptions {
  double t_end = 100.0;
  int n_points = 50;  // equally spaced on [0, t_end], including 0
  int n_paths = 1000;
  std::uint64_t seed = 1;
  int threads = 1;    // 0: all available; 1: serial reference kernel
  bool center = false;
  int bootstrap_resamples = 1000;
  FitWeighting weighting = FitWeighting::Ordinary;
  double drift_tolerance = 1e-9;
};

struct MsdEstimate {
  int dimension = 0;
  Vec times;
  Vec msd;
  Vec stderr_msd;
  Mat axis_msd;         // times × d, mean of Z_i(t)²
  Mat path_slopes;      // n_paths × d, per-path zero-intercept slopes per axis
  int n_paths = 0;
  std::uint64_t seed = 0;
  FitWeighting weighting = FitWeighting::Ordinary;
  int bootstrap_resamples = 1000;
  std::optional<Vec> centered_drift;

  // Filled by fit_diffusivity.
  double slope = 0.0;
  double d_e = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double ci95 = 0.0;  // half-width
  Vec axis_d_e;       // slope_i / 2
  Vec axis_ci_lo;
  Vec axis_ci_hi;
};

struct DiffusivityFit {
  double d_e = 0.0;
  double ci95 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Zero-intercept least-squares slope through (t_i, m_i).
double zero_intercept_slope(const Vec& times, const Vec& values, const Vec* weights = nullptr);

// D_e = slope/(2d). Uses the per-path bootstrap when path slopes are present,
// otherwise a normal interval from the fit residuals. Fills the fit fields.
// Throws DegenerateGrid.
DiffusivityFit fit_diffusivity(MsdEstimate& msd);

Vec default_time_grid(double t_end, int n_points);

// Graph walk started from π. Throws DriftNotCentered when Ū ≠ 0 and
// centering is off; with centering Ūt is subtracted before squaring.
MsdEstimate estimate_msd(const QuotientGraph& g, const MsdOptions& options);
// Reflecting walk started uniformly in free space.
MsdEstimate estimate_msd(const ReflectingWalkConfig& config, const MsdOptions& options);

// Per-path grid sampler shared by the serial and parallel reducers.
using PathSampler = std::function<void(std::uint64_t path, Mat& out)>;
MsdEstimate reduce_paths_serial(const PathSampler& sampler, int dimension, const Vec& times, const MsdOptions& options);
MsdEstimate reduce_paths_parallel(const PathSampler& sampler, int dimension, const Vec& times, const MsdOptions& options);

// CSV time,msd,stderr,n_paths preceded by `# key=value` lines.
std::string msd_csv(const MsdEstimate& m, const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace homog
