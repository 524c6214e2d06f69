#include "homog/experiments.hpp"

#include "homog/error.hpp"
#include "homog/geometry.hpp"
#include "homog/graph_io.hpp"
#include "homog/reflecting_walk.hpp"

#include <chrono>
#include <cmath>

namespace homog {

namespace {

std::string h_text(int n) { return n == 1 ? "1" : "1/" + std::to_string(n); }

}  // namespace

double isotropic_diffusivity(const Mat& c, bool axis_only) {
  const double scale = 1e-9 * (1.0 + c.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 1; i < c.rows(); ++i) {
    if (std::fabs(c(i, i) - c(0, 0)) > scale) {
      throw Error(Errc::InvariantViolated, "diagonal of C is not constant: " + format_number(c(0, 0)) + " vs " +
                                               format_number(c(i, i)));
    }
  }
  if (axis_only) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (i != j && std::fabs(c(i, j)) > scale) {
          throw Error(Errc::InvariantViolated, "off-diagonal C entry " + format_number(c(i, j)) + " is not zero");
        }
      }
    }
  }
  return c.trace() / static_cast<double>(c.rows());
}

std::vector<PathLengthRow> run_path_length(const std::vector<int>& resolutions, const AnalyzeOptions& options) {
  std::vector<PathLengthRow> rows;
  for (int n : resolutions) {
    const auto start = std::chrono::steady_clock::now();
    const QuotientGraph g = build_obstructed_lattice(n);
    const HomogenizationResult r = analyze(g, options);
    PathLengthRow row;
    row.n = n;
    row.nodes = g.num_nodes();
    row.c11 = r.C(0, 0);
    row.c22 = r.C(1, 1);
    row.c12 = r.C(0, 1);
    row.d_e = isotropic_diffusivity(r.C, true);
    row.diff_prev = rows.empty() ? 0.0 : std::fabs(row.d_e - rows.back().d_e);
    row.k_minus_c = r.K ? matrix_inf_norm(*r.K - r.C) : std::nan("");
    row.backend = r.backend;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

std::vector<InteractionRow> run_interactions(int n, const AnalyzeOptions& options) {
  std::vector<InteractionRow> rows;
  for (auto kind : {InteractionKind::Neutral, InteractionKind::Bonding, InteractionKind::Repulsion, InteractionKind::Attraction}) {
    const HomogenizationResult r = analyze(build_obstructed_lattice(n, ObstructionSpec::square_quadrant(), kind), options);
    rows.push_back(InteractionRow{kind, r.C(0, 0), r.C(1, 1), r.C(0, 1), isotropic_diffusivity(r.C, true)});
  }
  return rows;
}

std::vector<ContinuousRow> run_continuous_comparison(const std::vector<int>& resolutions, const MsdOptions& mc) {
  std::vector<ContinuousRow> rows;
  for (int n : resolutions) {
    ContinuousRow row;
    row.n = n;
    ReflectingWalkConfig config;
    config.h = 1.0 / n;
    MsdOptions opts = mc;
    opts.seed = mc.seed + static_cast<std::uint64_t>(n);
    const MsdEstimate m = estimate_msd(config, opts);
    row.d_continuous = m.d_e;
    row.ci_lo = m.ci_lo;
    row.ci_hi = m.ci_hi;
    row.d_plain = isotropic_diffusivity(analyze(build_obstructed_lattice(n)).C, true);
    row.d_diagonal = isotropic_diffusivity(analyze(build_diagonal_lattice(n)).C, false);
    rows.push_back(row);
  }
  return rows;
}

std::string path_length_csv(const std::vector<PathLengthRow>& rows, const std::optional<double>& pde_reference) {
  std::string out;
  out += "# experiment=path_length\n";
  out += "# plot.title=Effective diffusivity against path length\n";
  out += "# plot.x=log2_inv_h\n";
  out += "# plot.y=D_e\n";
  if (pde_reference) out += "# plot.hline=" + format_number(*pde_reference) + "\n";
  out += "h,log2_inv_h,nodes,C11,C22,C12,D_e,diff_prev,K_minus_C,backend,seconds\n";
  for (const auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.seconds);
    out += h_text(r.n) + "," + format_number(std::log2(static_cast<double>(r.n))) + "," + std::to_string(r.nodes) + "," +
           format_number(r.c11) + "," + format_number(r.c22) + "," + format_number(r.c12) + "," + format_number(r.d_e) +
           "," + format_number(r.diff_prev) + "," + format_number(r.k_minus_c) + "," +
           std::string(backend_name(r.backend)) + "," + secs + "\n";
  }
  return out;
}

std::string interactions_csv(const std::vector<InteractionRow>& rows) {
  std::string out;
  out += "# experiment=interactions\n";
  out += "# plot.title=Effective diffusivity by interaction\n";
  out += "# plot.x=index\n";
  out += "# plot.y=D_e\n";
  out += "index,interaction,C11,C22,C12,D_e\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(i + 1) + "," + std::string(interaction_name(r.kind)) + "," + format_number(r.c11) + "," +
           format_number(r.c22) + "," + format_number(r.c12) + "," + format_number(r.d_e) + "\n";
  }
  return out;
}

std::string continuous_csv(const std::vector<ContinuousRow>& rows, const MsdOptions& mc) {
  std::string out;
  out += "# experiment=continuous_comparison\n";
  out += "# seed=" + std::to_string(mc.seed) + "\n";
  out += "# n_paths=" + std::to_string(mc.n_paths) + "\n";
  out += "# t_end=" + format_number(mc.t_end) + "\n";
  out += "# plot.title=Continuous walk against lattice models\n";
  out += "# plot.x=log2_inv_h\n";
  out += "# plot.y=D_continuous,D_plain,D_diagonal\n";
  out += "# plot.err.D_continuous=ci_lo:ci_hi\n";
  out += "h,log2_inv_h,D_continuous,ci_lo,ci_hi,D_plain,D_diagonal\n";
  for (const auto& r : rows) {
    out += h_text(r.n) + "," + format_number(std::log2(static_cast<double>(r.n))) + "," + format_number(r.d_continuous) +
           "," + format_number(r.ci_lo) + "," + format_number(r.ci_hi) + "," + format_number(r.d_plain) + "," +
           format_number(r.d_diagonal) + "\n";
  }
  return out;
}

}  // namespace homog
