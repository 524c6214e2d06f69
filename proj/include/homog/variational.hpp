#pragma once

#include "homog/graph.hpp"

#include <cstdint>
#include <vector>

namespace homog {

// Every edge has a reversal carrying the same rate (to 1e-12 relative).
bool is_reversible(const QuotientGraph& g);
void require_reversible(const QuotientGraph& g);  // throws NotReversible

// Edge vector fields are m×d (row e), node scalar fields have length n.

// (∇f)(e) = (f(∂₊e) − f(∂₋e)) ν_e/|ν_e|²
Mat gradient(const QuotientGraph& g, const Vec& f);
// (div F)(y) = Σ_{e∈E_y} ν_eᵀF(e)/|ν_e|²
Vec divergence(const QuotientGraph& g, const Mat& F);

// A(e) = ν_e ν_eᵀ λ_e
std::vector<Mat> edge_matrices(const QuotientGraph& g);
// Row e holds A(e) F(e).
Mat apply_edge_matrices(const QuotientGraph& g, const Mat& F);

double field_inner(const Mat& F, const Mat& G);

// |(F,∇G) + 2 Σ (div F)(y) G(y)|. Throws ConditionNotMet unless F is
// symmetric under reversal or G(∂₊e) = −G(∂₋e) on every edge.
double divergence_theorem_check(const QuotientGraph& g, const Mat& F, const Vec& G);

struct DivergenceFormSolution {
  Vec upsilon;                     // mean zero
  double divergence_residual = 0;  // max_y |div(A(∇Υ + ξ/|S|))(y)|
  double transpose_residual = 0;   // max_y |(LᵀΥ)(y) − ξᵀσ(y)|
};
DivergenceFormSolution unit_cell_divergence_form(const QuotientGraph& g, const Vec& xi);

// E_ξ(φ) = (|S|/2) (A(∇φ + ξ/|S|), ∇φ + ξ/|S|); with this normalization
// E_ξ(Υ_ξ) = ξᵀKξ.
double energy(const QuotientGraph& g, const Vec& xi, const Vec& phi);
// (∇δ, A(∇φ + ξ/|S|))
double energy_directional_derivative(const QuotientGraph& g, const Vec& xi, const Vec& phi, const Vec& delta);

bool verify_minimizer(const QuotientGraph& g, const Vec& xi, const Vec& phi_star, int n_perturbations,
                      std::uint64_t seed = 1);

// Kξ = ½ ΣΣ A(e)(∇Υ_ξ(e) + ξ/|S|)
Vec k_times(const QuotientGraph& g, const Vec& xi, const Vec& upsilon);
// (|S|/2) Σ_e λ_e (ν_eᵀ ξ̃_e)², ξ̃_e = ∇(ξᵀω)(e) + ξ/|S|
double k_quadratic_form(const QuotientGraph& g, const Vec& xi, const Mat& omega);

// Rows ω(∂₊e) − ω(∂₋e) + ν_e/|S|; K is positive definite iff they span ℝᵈ.
Mat k_definiteness_vectors(const QuotientGraph& g, const Mat& omega);
bool edge_condition_holds(const QuotientGraph& g, const Mat& omega, const Vec& xi, double rel_tol = 1e-10);

}  // namespace homog
