#include "homog/msd.hpp"

#include "homog/ctmc.hpp"
#include "homog/error.hpp"
#include "homog/graph_io.hpp"
#include "homog/homogenize.hpp"
#include "homog/rate_matrix.hpp"
#include "homog/solvers.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace homog {

namespace {

constexpr std::uint64_t kBootstrapStream = 0xb007'57a9'0000'0000ull;

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

Vec fit_weights(const MsdEstimate& m) {
  Vec w = Vec::Ones(m.times.size());
  if (m.weighting == FitWeighting::InverseVariance) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double s = m.stderr_msd.size() ? m.stderr_msd[i] : 0.0;
      w[i] = s > 0.0 ? 1.0 / (s * s) : 0.0;
    }
  }
  return w;
}

void check_options(const MsdOptions& o) {
  if (!(o.t_end > 0.0)) throw Error(Errc::InvalidArgument, "t_end must be positive");
  if (o.n_points < 3) throw Error(Errc::DegenerateGrid, "need at least 3 time points");
  if (o.n_paths < 100) throw Error(Errc::InvalidArgument, "need at least 100 paths");
  if (o.bootstrap_resamples < 1) throw Error(Errc::InvalidArgument, "need at least one bootstrap resample");
}

MsdEstimate reduce_paths(const PathSampler& sampler, int d, const Vec& times, const MsdOptions& options,
                         bool parallel) {
  check_options(options);
  const int n_paths = options.n_paths;
  const Eigen::Index nt = times.size();
  // Row p: Z_p(t_i)_a² laid out time-major, d entries per time.
  Mat squares(n_paths, nt * d);

  auto run = [&](int p) {
    Mat z;
    sampler(static_cast<std::uint64_t>(p), z);
    for (Eigen::Index i = 0; i < nt; ++i) {
      for (int a = 0; a < d; ++a) squares(p, i * d + a) = z(i, a) * z(i, a);
    }
  };
  if (parallel) {
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (int p = 0; p < n_paths; ++p) run(p);
  } else {
    for (int p = 0; p < n_paths; ++p) run(p);
  }

  MsdEstimate m;
  m.dimension = d;
  m.times = times;
  m.n_paths = n_paths;
  m.seed = options.seed;
  m.weighting = options.weighting;
  m.bootstrap_resamples = options.bootstrap_resamples;
  m.msd = Vec::Zero(nt);
  m.stderr_msd = Vec::Zero(nt);
  m.axis_msd = Mat::Zero(nt, d);
  for (int p = 0; p < n_paths; ++p) {
    for (Eigen::Index i = 0; i < nt; ++i) {
      double total = 0.0;
      for (int a = 0; a < d; ++a) {
        m.axis_msd(i, a) += squares(p, i * d + a);
        total += squares(p, i * d + a);
      }
      m.msd[i] += total;
    }
  }
  m.msd /= n_paths;
  m.axis_msd /= n_paths;
  for (int p = 0; p < n_paths; ++p) {
    for (Eigen::Index i = 0; i < nt; ++i) {
      double total = 0.0;
      for (int a = 0; a < d; ++a) total += squares(p, i * d + a);
      m.stderr_msd[i] += (total - m.msd[i]) * (total - m.msd[i]);
    }
  }
  for (Eigen::Index i = 0; i < nt; ++i) m.stderr_msd[i] = std::sqrt(m.stderr_msd[i] / (n_paths - 1) / n_paths);

  const Vec w = fit_weights(m);
  double denom = 0.0;
  for (Eigen::Index i = 0; i < nt; ++i) denom += w[i] * times[i] * times[i];
  if (!(denom > 0.0)) throw Error(Errc::DegenerateGrid, "time grid has no weight away from t=0");
  m.path_slopes = Mat::Zero(n_paths, d);
  for (int p = 0; p < n_paths; ++p) {
    for (Eigen::Index i = 0; i < nt; ++i) {
      for (int a = 0; a < d; ++a) m.path_slopes(p, a) += w[i] * times[i] * squares(p, i * d + a);
    }
  }
  m.path_slopes /= denom;
  fit_diffusivity(m);
  return m;
}

}  // namespace

double zero_intercept_slope(const Vec& times, const Vec& values, const Vec* weights) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    num += w * times[i] * values[i];
    den += w * times[i] * times[i];
  }
  if (!(den > 0.0)) throw Error(Errc::DegenerateGrid, "time grid has no weight away from t=0");
  return num / den;
}

DiffusivityFit fit_diffusivity(MsdEstimate& m) {
  const Eigen::Index nt = m.times.size();
  if (nt < 3 || m.msd.size() != nt) throw Error(Errc::DegenerateGrid, "need at least 3 time points");
  if (m.dimension < 1) throw Error(Errc::InvalidArgument, "estimate has no dimension");
  const double two_d = 2.0 * m.dimension;
  const Vec w = fit_weights(m);
  m.slope = zero_intercept_slope(m.times, m.msd, &w);
  m.d_e = m.slope / two_d;
  m.axis_d_e = Vec::Zero(m.dimension);
  m.axis_ci_lo = Vec::Zero(m.dimension);
  m.axis_ci_hi = Vec::Zero(m.dimension);
  if (m.axis_msd.rows() == nt) {
    for (int a = 0; a < m.dimension; ++a) m.axis_d_e[a] = zero_intercept_slope(m.times, m.axis_msd.col(a), &w) / 2.0;
  }

  if (m.path_slopes.rows() >= 2) {
    const int n = static_cast<int>(m.path_slopes.rows());
    Rng rng(substream_seed(m.seed, kBootstrapStream));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<double> total(static_cast<std::size_t>(m.bootstrap_resamples));
    std::vector<std::vector<double>> axis(static_cast<std::size_t>(m.dimension),
                                          std::vector<double>(static_cast<std::size_t>(m.bootstrap_resamples)));
    for (int b = 0; b < m.bootstrap_resamples; ++b) {
      Vec acc = Vec::Zero(m.dimension);
      for (int k = 0; k < n; ++k) acc += m.path_slopes.row(pick(rng)).transpose();
      acc /= n;
      total[static_cast<std::size_t>(b)] = acc.sum() / two_d;
      for (int a = 0; a < m.dimension; ++a) axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = acc[a] / 2.0;
    }
    m.ci_lo = percentile(total, 0.025);
    m.ci_hi = percentile(total, 0.975);
    for (int a = 0; a < m.dimension; ++a) {
      m.axis_ci_lo[a] = percentile(axis[static_cast<std::size_t>(a)], 0.025);
      m.axis_ci_hi[a] = percentile(axis[static_cast<std::size_t>(a)], 0.975);
    }
  } else {
    double rss = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double r = m.msd[i] - m.slope * m.times[i];
      rss += w[i] * r * r;
      den += w[i] * m.times[i] * m.times[i];
    }
    const double se = std::sqrt(rss / static_cast<double>(nt - 1) / den) / two_d;
    m.ci_lo = m.d_e - 1.96 * se;
    m.ci_hi = m.d_e + 1.96 * se;
    m.axis_ci_lo = m.axis_d_e.array() - 1.96 * se;
    m.axis_ci_hi = m.axis_d_e.array() + 1.96 * se;
  }
  m.ci95 = 0.5 * (m.ci_hi - m.ci_lo);
  return DiffusivityFit{m.d_e, m.ci95, m.ci_lo, m.ci_hi};
}

Vec default_time_grid(double t_end, int n_points) {
  if (n_points < 2) throw Error(Errc::DegenerateGrid, "need at least 2 time points");
  return Vec::LinSpaced(n_points, 0.0, t_end);
}

MsdEstimate reduce_paths_serial(const PathSampler& sampler, int dimension, const Vec& times, const MsdOptions& options) {
  return reduce_paths(sampler, dimension, times, options, false);
}

MsdEstimate reduce_paths_parallel(const PathSampler& sampler, int dimension, const Vec& times,
                                  const MsdOptions& options) {
  return reduce_paths(sampler, dimension, times, options, true);
}

MsdEstimate estimate_msd(const QuotientGraph& g, const MsdOptions& options) {
  check_options(options);
  const SingularSystem sys(build_rate_matrix(g).entries);
  const Vec pi = stationary_from_system(sys);
  const NullDriftCheck nd = check_null_drift(g, pi, options.drift_tolerance);
  std::optional<Vec> drift;
  if (!nd.holds) {
    if (!options.center) {
      throw Error(Errc::DriftNotCentered, "long-run drift " + format_number(nd.magnitude) + " is not zero; enable centering");
    }
    drift = long_run_drift(g, pi);
  }

  Vec cumulative(pi.size());
  std::partial_sum(pi.data(), pi.data() + pi.size(), cumulative.data());
  const CtmcSampler ctmc(g);
  const Vec times = default_time_grid(options.t_end, options.n_points);
  PathSampler sampler = [&](std::uint64_t path, Mat& out) {
    Rng rng(substream_seed(options.seed, path));
    const int start = ctmc.sample_node(cumulative, rng);
    ctmc.sample_grid(start, times, rng, out);
    if (drift) {
      for (Eigen::Index i = 0; i < times.size(); ++i) out.row(i) -= times[i] * drift->transpose();
    }
  };
  MsdEstimate m = options.threads == 1 ? reduce_paths_serial(sampler, g.dimension(), times, options)
                                       : reduce_paths_parallel(sampler, g.dimension(), times, options);
  m.centered_drift = drift;
  return m;
}

MsdEstimate estimate_msd(const ReflectingWalkConfig& config, const MsdOptions& options) {
  check_options(options);
  config.validate();
  const Vec times = default_time_grid(options.t_end, options.n_points);
  PathSampler sampler = [&](std::uint64_t path, Mat& out) {
    Rng rng(substream_seed(options.seed, path));
    sample_reflecting_grid(config, times, rng, out);
  };
  const int d = config.geometry.dimension;
  return options.threads == 1 ? reduce_paths_serial(sampler, d, times, options)
                              : reduce_paths_parallel(sampler, d, times, options);
}

std::string msd_csv(const MsdEstimate& m, const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::string out;
  out += "# seed=" + std::to_string(m.seed) + "\n";
  for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
  out += "# dimension=" + std::to_string(m.dimension) + "\n";
  out += "# fit=" + std::string(m.weighting == FitWeighting::Ordinary ? "ols" : "inverse_variance") + "\n";
  out += "# d_e=" + format_number(m.d_e) + "\n";
  out += "# ci95_lo=" + format_number(m.ci_lo) + "\n";
  out += "# ci95_hi=" + format_number(m.ci_hi) + "\n";
  for (Eigen::Index a = 0; a < m.axis_d_e.size(); ++a) {
    out += "# d_e_axis" + std::to_string(a + 1) + "=" + format_number(m.axis_d_e[a]) + "\n";
  }
  if (m.centered_drift) {
    out += "# centered_drift=";
    for (Eigen::Index a = 0; a < m.centered_drift->size(); ++a) out += (a ? " " : "") + format_number((*m.centered_drift)[a]);
    out += "\n";
  }
  out += "time,msd,stderr,n_paths\n";
  for (Eigen::Index i = 0; i < m.times.size(); ++i) {
    out += format_number(m.times[i]) + "," + format_number(m.msd[i]) + "," + format_number(m.stderr_msd[i]) + "," +
           std::to_string(m.n_paths) + "\n";
  }
  return out;
}

}  // namespace homog
