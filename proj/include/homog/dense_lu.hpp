#pragma once

#include "homog/graph.hpp"

#include <vector>

namespace homog {

// In-place LU with partial pivoting, PA = LU, unit lower triangle implied.
struct LuFactorization {
  Mat lu;
  std::vector<int> perm;  // row i of PA is row perm[i] of A
  double min_pivot = 0.0;
  double max_pivot = 0.0;

  bool singular(double rel_tol = 1e-13) const { return !(min_pivot > rel_tol * max_pivot); }
};

// Reference kernel.
LuFactorization lu_factor_serial(Mat a);
// Same arithmetic, trailing update split across OpenMP threads; bitwise
// identical to the serial kernel.
LuFactorization lu_factor_parallel(Mat a);

LuFactorization lu_factor(Mat a, bool parallel);

// Solves A X = B.
Mat lu_solve(const LuFactorization& f, const Mat& b);
// Solves Aᵀ X = B.
Mat lu_solve_transpose(const LuFactorization& f, const Mat& b);

}  // namespace homog
