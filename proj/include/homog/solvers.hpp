#pragma once

#include "homog/dense_lu.hpp"
#include "homog/graph.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <map>
#include <memory>
#include <optional>

namespace homog {

using SpMat = Eigen::SparseMatrix<double>;

enum class Gauge { MeanZero, PinFirst };
enum class Backend { Auto, Dense, Sparse };

std::string_view gauge_name(Gauge g);
std::string_view backend_name(Backend b);

// Systems at or below this many unknowns use the dense LU under Backend::Auto.
inline constexpr int kDenseLimit = 600;

struct SingularSolveReport {
  Mat solution;  // one column per right-hand side
  double residual_norm = 0.0;
  Gauge gauge = Gauge::MeanZero;
  Backend backend = Backend::Dense;
};

// A square matrix with a one-dimensional nullspace (a generator or its
// transpose). Factorizations are built lazily and cached, so one instance
// serves solves with A and with Aᵀ. Not safe for concurrent use; distinct
// instances are independent.
class SingularSystem {
 public:
  explicit SingularSystem(SpMat a, Backend backend = Backend::Auto, bool parallel = false);
  explicit SingularSystem(const Mat& a, Backend backend = Backend::Auto, bool parallel = false);
  ~SingularSystem();
  SingularSystem(SingularSystem&&) noexcept;
  SingularSystem& operator=(SingularSystem&&) noexcept;

  int size() const { return static_cast<int>(a_.rows()); }
  Backend backend() const { return backend_; }
  const SpMat& matrix() const { return a_; }

  // Nullvectors of A and of Aᵀ, with max-norm 1 and a positive largest entry.
  const Vec& right_nullvector() const;
  const Vec& left_nullvector() const;

  // Solves A X = B (or Aᵀ X = B) column by column under the gauge.
  // Throws Inconsistent when a column has a component along the left nullspace.
  SingularSolveReport solve(const Mat& b, Gauge gauge = Gauge::MeanZero, bool transpose = false) const;

  double consistency_tolerance() const { return 1e-9; }
  double residual_factor() const { return 1e-10; }

 private:
  struct DenseState;
  struct SparseState;
  void init(Backend backend);
  Vec null_of(bool transpose) const;
  Mat particular(const Mat& b, bool transpose, Gauge gauge) const;

  SpMat a_;
  Backend backend_;
  bool parallel_;
  mutable std::unique_ptr<DenseState> dense_;
  mutable std::unique_ptr<SparseState> sparse_;
  mutable std::optional<Vec> right_null_;
  mutable std::optional<Vec> left_null_;
};

// Returns x with gᵀx = 0 per column by shifting along v, where g is the gauge
// functional (ones for MeanZero, e₀ for PinFirst).
Mat regauge(const Mat& x, const Vec& nullvector, Gauge gauge);

// π with Lᵀπ = 0 and Σπ = 1. Throws SolveFailed or NonPositiveEntry.
Vec stationary_nullvector(const SpMat& l_transpose, Backend backend = Backend::Auto);
Vec stationary_nullvector(const Mat& l_transpose, Backend backend = Backend::Auto);
// π from a system built on L itself (its left nullvector).
Vec stationary_from_system(const SingularSystem& l_system);

SingularSolveReport solve_singular_consistent(const Mat& a, const Mat& b, Gauge gauge = Gauge::MeanZero,
                                              Backend backend = Backend::Auto);

}  // namespace homog
