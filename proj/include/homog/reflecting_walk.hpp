#pragma once

#include "homog/geometry.hpp"
#include "homog/rng.hpp"

#include <cstdint>
#include <vector>

namespace homog {

struct ReflectingWalkConfig {
  double h = 0.125;
  double wait = 0.0;  // 0 selects h²/(2d)
  ObstructionSpec geometry = ObstructionSpec::square_quadrant();
  int max_reflections = 64;

  double wait_time() const { return wait > 0.0 ? wait : h * h / (2.0 * geometry.dimension); }
  void validate() const;
};

struct ReflectedStep {
  Vec end;
  std::vector<Vec> vertices;  // start, each bounce point, end
  int reflections = 0;
  double length = 0.0;        // arc length travelled
};

// Moves `length` from `start` along unit `direction`, mirroring off box faces.
// Throws ReflectionOverflow past `max_reflections` bounces.
ReflectedStep reflect_step(const ObstructionSpec& geometry, const Vec& start, const Vec& direction, double length,
                           int max_reflections = 64);

// How far x lies inside the obstruction (≤ 0 when outside or on a face).
double penetration_depth(const ObstructionSpec& geometry, const Vec& x);

Vec sample_free_point(const ObstructionSpec& geometry, Rng& rng);
Vec random_direction(int dimension, Rng& rng);

struct ReflectingPath {
  std::vector<double> times;
  std::vector<Vec> positions;  // position held from times[k] on
  int reflections = 0;
};

ReflectingPath simulate_reflecting_walk(const ReflectingWalkConfig& config, double t_end, std::uint64_t seed);

// Displacement from the start at each (ascending) time; rows of `out`.
void sample_reflecting_grid(const ReflectingWalkConfig& config, const Vec& times, Rng& rng, Mat& out);

}  // namespace homog
