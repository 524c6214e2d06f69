#pragma once

#include "homog/graph.hpp"
#include "homog/rate_matrix.hpp"
#include "homog/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace homog {

inline constexpr double kNullDriftTolerance = 1e-9;

// Per-node ℝᵈ fields are stored as n×d matrices (row y is the value at node y);
// per-edge fields as m×d.

// ρ(y) = Σ_{e∈E_y} ν_e λ_e
Mat drift_field(const QuotientGraph& g);

struct LongRunDrift {
  Vec node_form;  // Σ_y ρ(y) π(y)
  Vec edge_form;  // Σ_e ν_e λ_e π(∂₋e)
};
// Returns Ū; throws InvariantViolated if the two forms disagree beyond 1e-12 (scaled).
Vec long_run_drift(const QuotientGraph& g, const Vec& pi);
LongRunDrift long_run_drift_forms(const QuotientGraph& g, const Vec& pi);

struct NullDriftCheck {
  bool holds = false;
  double magnitude = 0.0;  // ‖Ū‖∞
  double threshold = 0.0;
};
NullDriftCheck check_null_drift(const QuotientGraph& g, const Vec& pi, double tol = kNullDriftTolerance);

enum class BalanceStatus { Holds, MissingReversal, Numeric };

struct DetailedBalanceCheck {
  BalanceStatus status = BalanceStatus::Holds;
  std::vector<int> violating_edges;

  bool holds() const { return status == BalanceStatus::Holds; }
  std::string reason() const;
};
DetailedBalanceCheck check_detailed_balance(const QuotientGraph& g, const Vec& pi, double tol = kNullDriftTolerance);

struct SymmetryCheck {
  std::vector<bool> involution;
  std::vector<bool> generator_invariant;
  std::vector<bool> negates_drift;
  std::vector<bool> axis_pass;
  bool overall = false;
};
// phis[i] is a node permutation for axis i. Throws NotAPermutation.
SymmetryCheck check_symmetry_null_drift(const QuotientGraph& g, const std::vector<std::vector<int>>& phis);

// Solves Lψ = ρ (or ρ − Ū when centered). Throws Inconsistent when Ū ≠ 0 and
// not centered. `system` may carry a reusable factorization of L.
Mat corrector_psi(const QuotientGraph& g, const Vec& pi, const SingularSystem* system = nullptr,
                  Gauge gauge = Gauge::MeanZero, bool centered = false);

struct DiffusivityC {
  Mat C;
  Mat alpha;  // α_e = ν_e − (ψ(∂₊e) − ψ(∂₋e))
  bool alpha_spans = false;
};
DiffusivityC diffusivity_C(const QuotientGraph& g, const Vec& pi, const Mat& psi);

// σ(y) = Σ_{e∈E'_y} ν_e λ_e π(∂₋e). Throws InvariantViolated if Σσ ≠ Ū.
Mat unit_cell_sigma(const QuotientGraph& g, const Vec& pi);
// Solves Lᵀω = σ. Throws Inconsistent when the null drift condition fails.
Mat unit_cell_omega(const QuotientGraph& g, const Vec& pi, const SingularSystem* system = nullptr,
                    Gauge gauge = Gauge::MeanZero);
Mat diffusivity_K(const QuotientGraph& g, const Vec& pi, const Mat& omega);

bool positive_definite(const Mat& m, double rel_tol = 1e-10);
// Singular values below rel_tol·max(s₀, scale) count as zero.
int span_rank(const Mat& rows, double rel_tol = 1e-10, double scale = 0.0);
double matrix_inf_norm(const Mat& m);

struct AnalyzeOptions {
  double tolerance = kNullDriftTolerance;
  Backend backend = Backend::Auto;
  Gauge gauge = Gauge::MeanZero;
  bool parallel = false;
};

struct HomogenizationChecks {
  bool null_drift = false;
  DetailedBalanceCheck detailed_balance;
  std::optional<bool> K_equals_C;  // absent when K is not solvable
  bool C_positive_definite = false;
  bool alpha_spans = false;
};

struct HomogenizationResult {
  int dimension = 0;
  Vec pi;
  Mat rho;
  Vec u_bar;
  Mat psi;
  Mat alpha;
  Mat C;
  Mat sigma;
  std::optional<Mat> omega;
  std::optional<Mat> K;
  bool centered = false;
  double u_bar_norm = 0.0;
  double psi_residual = 0.0;
  double omega_residual = 0.0;
  Backend backend = Backend::Dense;
  HomogenizationChecks checks;

  double scalar_diffusivity() const { return C.trace() / static_cast<double>(dimension); }
};

HomogenizationResult analyze(const QuotientGraph& g, const AnalyzeOptions& options = {});

// Key-value plus [matrix] block document.
std::string serialize_result(const HomogenizationResult& r);

}  // namespace homog
