#include "homog/dense_lu.hpp"

#include "homog/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace homog {

namespace {

template <bool Parallel>
LuFactorization factor(Mat a) {
  if (a.rows() != a.cols()) throw Error(Errc::InvalidArgument, "LU needs a square matrix");
  const Eigen::Index n = a.rows();
  LuFactorization f;
  f.perm.resize(static_cast<std::size_t>(n));
  std::iota(f.perm.begin(), f.perm.end(), 0);
  f.min_pivot = n ? std::numeric_limits<double>::infinity() : 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    double best = std::fabs(a(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::fabs(a(i, k)) > best) {
        best = std::fabs(a(i, k));
        p = i;
      }
    }
    if (p != k) {
      a.row(k).swap(a.row(p));
      std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(p)]);
    }
    f.min_pivot = std::min(f.min_pivot, best);
    f.max_pivot = std::max(f.max_pivot, best);
    if (best == 0.0) continue;

    const double pivot = a(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) a(i, k) /= pivot;

    const Eigen::Index m = n - k - 1;
    double* base = a.data();
    const Eigen::Index ld = a.outerStride();
    auto update_column = [&](Eigen::Index j) {
      const double akj = base[k + j * ld];
      if (akj == 0.0) return;
      double* col = base + j * ld;
      const double* lcol = base + k * ld;
      for (Eigen::Index i = k + 1; i < n; ++i) col[i] -= lcol[i] * akj;
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) if (m > 64)
      for (Eigen::Index j = k + 1; j < n; ++j) update_column(j);
    } else {
      for (Eigen::Index j = k + 1; j < n; ++j) update_column(j);
    }
  }
  f.lu = std::move(a);
  return f;
}

}  // namespace

LuFactorization lu_factor_serial(Mat a) { return factor<false>(std::move(a)); }
LuFactorization lu_factor_parallel(Mat a) { return factor<true>(std::move(a)); }

LuFactorization lu_factor(Mat a, bool parallel) {
  return parallel ? lu_factor_parallel(std::move(a)) : lu_factor_serial(std::move(a));
}

Mat lu_solve(const LuFactorization& f, const Mat& b) {
  const Eigen::Index n = f.lu.rows();
  Mat x(n, b.cols());
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = b.row(f.perm[static_cast<std::size_t>(i)]);
  f.lu.triangularView<Eigen::UnitLower>().solveInPlace(x);
  f.lu.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Mat lu_solve_transpose(const LuFactorization& f, const Mat& b) {
  // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ z = y, x = Pᵀ z.
  const Eigen::Index n = f.lu.rows();
  Mat z = b;
  f.lu.transpose().triangularView<Eigen::Lower>().solveInPlace(z);
  f.lu.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(z);
  Mat x(n, b.cols());
  for (Eigen::Index i = 0; i < n; ++i) x.row(f.perm[static_cast<std::size_t>(i)]) = z.row(i);
  return x;
}

}  // namespace homog
