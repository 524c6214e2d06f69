#include "homog/reflecting_walk.hpp"

#include "homog/error.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace homog {

namespace {

constexpr double kCornerTol = 1e-12;
constexpr double kHitTol = 1e-12;

constexpr int kMaxDim = 8;

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  int n_axes = 0;
  std::array<int, kMaxDim> axes{};
};

// First entry of the segment p + t u, t ∈ (0, reach], into any periodic box image.
Hit first_hit(const ObstructionSpec& geo, const double* p, const double* u, double reach) {
  const int d = geo.dimension;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Hit best;
  std::array<int, kMaxDim> lo_shift{}, count{};
  std::array<double, kMaxDim> near{};
  for (const auto& box : geo.boxes) {
    int combos = 1;
    for (int i = 0; i < d; ++i) {
      const double a = std::min(p[i], p[i] + reach * u[i]);
      const double b = std::max(p[i], p[i] + reach * u[i]);
      // Images z + box whose slab on axis i meets [a, b].
      const int z0 = static_cast<int>(std::ceil(a - box.hi[i] - 1e-9));
      const int z1 = static_cast<int>(std::floor(b - box.lo[i] + 1e-9));
      lo_shift[i] = z0;
      count[i] = std::max(0, z1 - z0 + 1);
      combos *= count[i];
    }
    for (int c = 0; c < combos; ++c) {
      int rest = c;
      double t_enter = -inf;
      double t_exit = inf;
      bool miss = false;
      for (int i = 0; i < d && !miss; ++i) {
        const int z = lo_shift[i] + rest % count[i];
        rest /= count[i];
        const double lo = z + box.lo[i];
        const double hi = z + box.hi[i];
        if (u[i] == 0.0) {
          near[i] = -inf;
          if (p[i] <= lo || p[i] >= hi) miss = true;
          continue;
        }
        double t0 = (lo - p[i]) / u[i];
        double t1 = (hi - p[i]) / u[i];
        if (t0 > t1) std::swap(t0, t1);
        near[i] = t0;
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
      }
      if (miss || t_enter >= t_exit - kHitTol || t_enter < -kHitTol || t_enter > reach || t_exit <= kHitTol) continue;
      if (t_enter < best.t - kCornerTol) {
        best.t = t_enter;
        best.n_axes = 0;
        for (int i = 0; i < d; ++i) {
          if (std::fabs(near[i] - t_enter) <= kCornerTol) best.axes[best.n_axes++] = i;
        }
      }
    }
  }
  return best;
}

// Moves p along u in place, flipping u at each bounce; on_bounce sees p.
template <class OnBounce>
int advance(const ObstructionSpec& geometry, double* p, double* u, double length, int max_reflections,
            double& travelled, OnBounce&& on_bounce) {
  const int d = geometry.dimension;
  int reflections = 0;
  double remaining = length;
  while (remaining > 0.0) {
    const Hit hit = first_hit(geometry, p, u, remaining);
    if (hit.n_axes == 0) {
      for (int i = 0; i < d; ++i) p[i] += remaining * u[i];
      travelled += remaining;
      break;
    }
    if (reflections == max_reflections) {
      throw Error(Errc::ReflectionOverflow, "more than " + std::to_string(max_reflections) + " reflections in one step");
    }
    const double t = std::max(hit.t, 0.0);
    for (int i = 0; i < d; ++i) p[i] += t * u[i];
    travelled += t;
    remaining -= t;
    for (int k = 0; k < hit.n_axes; ++k) u[hit.axes[k]] = -u[hit.axes[k]];
    ++reflections;
    on_bounce(p);
  }
  return reflections;
}

// Allocation-free step for the sampling loops; x is updated in place.
int step_in_place(const ReflectingWalkConfig& config, Vec& x, Rng& rng) {
  const int d = config.geometry.dimension;
  std::array<double, kMaxDim> u{};
  if (d == 2) {
    const double theta = 2.0 * M_PI * uniform01(rng);
    u[0] = std::cos(theta);
    u[1] = std::sin(theta);
  } else {
    const Vec r = random_direction(d, rng);
    for (int i = 0; i < d; ++i) u[i] = r[i];
  }
  double travelled = 0.0;
  return advance(config.geometry, x.data(), u.data(), config.h, config.max_reflections, travelled, [](const double*) {});
}

}  // namespace

void ReflectingWalkConfig::validate() const {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "step length must be positive");
  if (max_reflections < 0) throw Error(Errc::InvalidArgument, "max_reflections must be non-negative");
  geometry.validate();
  if (geometry.dimension > kMaxDim) throw Error(Errc::InvalidArgument, "reflecting walk supports at most 8 dimensions");
}

ReflectedStep reflect_step(const ObstructionSpec& geometry, const Vec& start, const Vec& direction, double length,
                           int max_reflections) {
  const int d = geometry.dimension;
  if (d > kMaxDim) throw Error(Errc::InvalidArgument, "reflecting walk supports at most 8 dimensions");
  ReflectedStep step;
  Vec p = start;
  Vec u = direction / direction.norm();
  step.vertices.push_back(p);
  step.reflections = advance(geometry, p.data(), u.data(), length, max_reflections, step.length,
                             [&](const double* q) { step.vertices.push_back(Eigen::Map<const Vec>(q, d)); });
  step.end = p;
  step.vertices.push_back(p);
  return step;
}

double penetration_depth(const ObstructionSpec& geometry, const Vec& x) {
  double deepest = -std::numeric_limits<double>::infinity();
  for (const auto& box : geometry.boxes) {
    double depth = std::numeric_limits<double>::infinity();
    for (int i = 0; i < geometry.dimension; ++i) {
      double best_axis = -std::numeric_limits<double>::infinity();
      const double base = std::floor(x[i]);
      for (int z = -1; z <= 1; ++z) {
        const double v = x[i] - base + z;
        best_axis = std::max(best_axis, std::min(v - box.lo[i], box.hi[i] - v));
      }
      depth = std::min(depth, best_axis);
    }
    deepest = std::max(deepest, depth);
  }
  return deepest;
}

Vec sample_free_point(const ObstructionSpec& geometry, Rng& rng) {
  Vec x(geometry.dimension);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    for (int i = 0; i < geometry.dimension; ++i) x[i] = uniform01(rng);
    if (!(penetration_depth(geometry, x) >= 0.0)) return x;
  }
  throw Error(Errc::EmptyGraph, "no free space to start from");
}

Vec random_direction(int dimension, Rng& rng) {
  if (dimension == 2) {
    const double theta = 2.0 * M_PI * uniform01(rng);
    Vec u(2);
    u << std::cos(theta), std::sin(theta);
    return u;
  }
  std::normal_distribution<double> normal;
  Vec u(dimension);
  do {
    for (int i = 0; i < dimension; ++i) u[i] = normal(rng);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

ReflectingPath simulate_reflecting_walk(const ReflectingWalkConfig& config, double t_end, std::uint64_t seed) {
  config.validate();
  Rng rng(substream_seed(seed, 0));
  ReflectingPath path;
  Vec x = sample_free_point(config.geometry, rng);
  const double wait = config.wait_time();
  path.times.push_back(0.0);
  path.positions.push_back(x);
  for (long k = 1; k * wait <= t_end; ++k) {
    path.reflections += step_in_place(config, x, rng);
    path.times.push_back(k * wait);
    path.positions.push_back(x);
  }
  return path;
}

void sample_reflecting_grid(const ReflectingWalkConfig& config, const Vec& times, Rng& rng, Mat& out) {
  const int d = config.geometry.dimension;
  out.resize(times.size(), d);
  const Vec origin = sample_free_point(config.geometry, rng);
  Vec x = origin;
  const double wait = config.wait_time();
  long steps = 0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const long target = static_cast<long>(std::floor(times[i] / wait + 1e-9));
    for (; steps < target; ++steps) {
      step_in_place(config, x, rng);
    }
    out.row(i) = (x - origin).transpose();
  }
}

}  // namespace homog
