#pragma once

#include "homog/homogenize.hpp"
#include "homog/geometry.hpp"
#include "homog/msd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace homog {

struct PathLengthRow {
  int n = 0;  // 1/h
  int nodes = 0;
  double c11 = 0, c22 = 0, c12 = 0;
  double d_e = 0;
  double diff_prev = 0;  // |D_e(h) − D_e(2h)|, 0 on the first row
  double k_minus_c = 0;
  Backend backend = Backend::Dense;
  double seconds = 0;
};

struct InteractionRow {
  InteractionKind kind = InteractionKind::Neutral;
  double c11 = 0, c22 = 0, c12 = 0;
  double d_e = 0;
};

struct ContinuousRow {
  int n = 0;
  double d_continuous = 0, ci_lo = 0, ci_hi = 0;
  double d_plain = 0;
  double d_diagonal = 0;
};

// Throws InvariantViolated when C₁₁ ≠ C₂₂, or C₁₂ ≠ 0 for an axis-only
// graph, before the scalar D_e = tr(C)/d is reported.
double isotropic_diffusivity(const Mat& c, bool axis_only);

std::vector<PathLengthRow> run_path_length(const std::vector<int>& resolutions, const AnalyzeOptions& options = {});
std::vector<InteractionRow> run_interactions(int n = 8, const AnalyzeOptions& options = {});
std::vector<ContinuousRow> run_continuous_comparison(const std::vector<int>& resolutions, const MsdOptions& mc);

std::string path_length_csv(const std::vector<PathLengthRow>& rows, const std::optional<double>& pde_reference);
std::string interactions_csv(const std::vector<InteractionRow>& rows);
std::string continuous_csv(const std::vector<ContinuousRow>& rows, const MsdOptions& mc);

// Line/scatter chart driven by `# plot.*` metadata in the CSV.
std::string render_svg(const std::string& csv);

}  // namespace homog
