#pragma once

#include "homog/graph.hpp"
#include "homog/solvers.hpp"

namespace homog {

// Generator L of the projected chain, L(x,y) = λ̄(x,y) off the diagonal and
// rows summing to zero, plus the per-node total rate λ⁰.
struct RateMatrix {
  SpMat entries;
  Vec total_rate;

  int size() const { return static_cast<int>(entries.rows()); }
  Mat dense() const { return Mat(entries); }
};

RateMatrix build_rate_matrix(const QuotientGraph& g);

// (Lf)(y) = Σ_{e∈E_y} (f(y+ν_e) − f(y)) λ_e, applied columnwise.
Mat apply_generator(const QuotientGraph& g, const Mat& f);
// (Lᵀf)(y) = Σ_{e∈E'_y} f(y−ν_e) λ_e − f(y) λ⁰(y).
Mat apply_generator_transpose(const QuotientGraph& g, const Mat& f);

}  // namespace homog
