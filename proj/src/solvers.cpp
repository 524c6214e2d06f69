#include "homog/solvers.hpp"

#include "homog/error.hpp"

#include <cmath>

namespace homog {

std::string_view gauge_name(Gauge g) { return g == Gauge::MeanZero ? "mean_zero" : "pin_first"; }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Dense: return "dense";
    case Backend::Sparse: return "sparse";
  }
  return "?";
}

struct SingularSystem::DenseState {
  Mat a;
  std::map<std::pair<bool, int>, LuFactorization> replaced;  // (transpose, row) -> factors of the ones-row matrix
  std::map<std::pair<bool, Gauge>, std::pair<int, LuFactorization>> gauged;
};

struct SingularSystem::SparseState {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  Vec first_col;  // A(1:,0)
  Vec first_row;  // A(0,1:)ᵀ
};

namespace {

double inf_norm(const SpMat& a) {
  Vec row_sums = Vec::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) row_sums[it.row()] += std::fabs(it.value());
  }
  return a.rows() ? row_sums.maxCoeff() : 0.0;
}

Vec normalize_sign(Vec v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  return v / v[k];
}

Vec gauge_row(Gauge gauge, Eigen::Index n) {
  if (gauge == Gauge::MeanZero) return Vec::Ones(n);
  Vec g = Vec::Zero(n);
  g[0] = 1.0;
  return g;
}

}  // namespace

SingularSystem::SingularSystem(SpMat a, Backend backend, bool parallel)
    : a_(std::move(a)), backend_(backend), parallel_(parallel) {
  init(backend);
}

SingularSystem::SingularSystem(const Mat& a, Backend backend, bool parallel)
    : a_(a.sparseView()), backend_(backend), parallel_(parallel) {
  init(backend);
}

SingularSystem::~SingularSystem() = default;
SingularSystem::SingularSystem(SingularSystem&&) noexcept = default;
SingularSystem& SingularSystem::operator=(SingularSystem&&) noexcept = default;

void SingularSystem::init(Backend backend) {
  if (a_.rows() != a_.cols()) throw Error(Errc::InvalidArgument, "singular system needs a square matrix");
  if (a_.rows() == 0) throw Error(Errc::InvalidArgument, "empty system");
  a_.makeCompressed();
  if (backend == Backend::Auto) backend = a_.rows() <= kDenseLimit ? Backend::Dense : Backend::Sparse;
  if (a_.rows() == 1) backend = Backend::Dense;
  backend_ = backend;

  if (backend_ == Backend::Dense) {
    dense_ = std::make_unique<DenseState>();
    dense_->a = Mat(a_);
    return;
  }
  sparse_ = std::make_unique<SparseState>();
  const Eigen::Index n = a_.rows();
  SpMat inner = a_.bottomRightCorner(n - 1, n - 1);
  sparse_->lu.compute(inner);
  if (sparse_->lu.info() != Eigen::Success) {
    throw Error(Errc::SolveFailed, "sparse LU failed: " + sparse_->lu.lastErrorMessage());
  }
  sparse_->first_col = Mat(a_.block(1, 0, n - 1, 1));
  sparse_->first_row = Mat(a_.block(0, 1, 1, n - 1)).transpose();
}

Vec SingularSystem::null_of(bool transpose) const {
  const Eigen::Index n = a_.rows();
  if (sparse_) {
    Vec x(n);
    x[0] = 1.0;
    if (transpose) {
      const Vec part = sparse_->lu.transpose().solve(Vec(-sparse_->first_row));
      x.tail(n - 1) = part;
    } else {
      const Vec part = sparse_->lu.solve(Vec(-sparse_->first_col));
      x.tail(n - 1) = part;
    }
    return normalize_sign(std::move(x));
  }

  const Mat b = transpose ? Mat(dense_->a.transpose()) : dense_->a;
  const double scale = std::max(b.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
  const int tries = static_cast<int>(std::min<Eigen::Index>(n, 8));
  for (int t = 0; t < tries; ++t) {
    const int r = static_cast<int>(n - 1 - t);
    Mat m = b;
    m.row(r).setOnes();
    LuFactorization f = lu_factor(std::move(m), parallel_);
    if (f.singular()) continue;
    Vec e = Vec::Zero(n);
    e[r] = 1.0;
    Vec x = lu_solve(f, e);
    if ((b * x).cwiseAbs().maxCoeff() <= 1e-10 * scale * x.cwiseAbs().maxCoeff()) {
      return normalize_sign(std::move(x));
    }
  }
  throw Error(Errc::SolveFailed, "could not isolate a one-dimensional nullspace");
}

const Vec& SingularSystem::right_nullvector() const {
  if (!right_null_) right_null_ = null_of(false);
  return *right_null_;
}

const Vec& SingularSystem::left_nullvector() const {
  if (!left_null_) left_null_ = null_of(true);
  return *left_null_;
}

Mat SingularSystem::particular(const Mat& b, bool transpose, Gauge gauge) const {
  const Eigen::Index n = a_.rows();
  if (sparse_) {
    Mat x = Mat::Zero(n, b.cols());
    if (transpose) {
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        const Vec part = sparse_->lu.transpose().solve(Vec(b.col(j).tail(n - 1)));
        x.col(j).tail(n - 1) = part;
      }
    } else {
      const Mat part = sparse_->lu.solve(Mat(b.bottomRows(n - 1)));
      x.bottomRows(n - 1) = part;
    }
    return regauge(x, transpose ? left_nullvector() : right_nullvector(), gauge);
  }

  auto key = std::make_pair(transpose, gauge);
  auto it = dense_->gauged.find(key);
  if (it == dense_->gauged.end()) {
    const Vec& u = transpose ? right_nullvector() : left_nullvector();
    Eigen::Index k = 0;
    u.cwiseAbs().maxCoeff(&k);
    Mat m = transpose ? Mat(dense_->a.transpose()) : dense_->a;
    m.row(k) = gauge_row(gauge, n).transpose();
    LuFactorization f = lu_factor(std::move(m), parallel_);
    if (f.singular()) throw Error(Errc::SolveFailed, "gauged system is singular");
    it = dense_->gauged.emplace(key, std::make_pair(static_cast<int>(k), std::move(f))).first;
  }
  Mat rhs = b;
  rhs.row(it->second.first).setZero();
  return lu_solve(it->second.second, rhs);
}

SingularSolveReport SingularSystem::solve(const Mat& b, Gauge gauge, bool transpose) const {
  const Eigen::Index n = a_.rows();
  if (b.rows() != n) throw Error(Errc::InvalidArgument, "right-hand side has wrong length");

  const Vec& w = transpose ? right_nullvector() : left_nullvector();
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const double projection = std::fabs(w.dot(b.col(j)));
    const double bound = consistency_tolerance() * b.col(j).norm() * w.norm();
    if (projection > bound) {
      throw Error(Errc::Inconsistent, "right-hand side column " + std::to_string(j) +
                                          " has left-nullspace component " + std::to_string(projection));
    }
  }

  SingularSolveReport report;
  report.gauge = gauge;
  report.backend = backend_;
  report.solution = particular(b, transpose, gauge);

  const Mat ax = transpose ? Mat(a_.transpose() * report.solution) : Mat(a_ * report.solution);
  report.residual_norm = n ? (ax - b).cwiseAbs().maxCoeff() : 0.0;
  const double norm_a = transpose ? inf_norm(SpMat(a_.transpose())) : inf_norm(a_);
  const double bound = residual_factor() * (norm_a * report.solution.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff());
  if (report.residual_norm > bound && report.residual_norm > 0.0) {
    throw Error(Errc::SolveFailed, "residual " + std::to_string(report.residual_norm) + " exceeds " +
                                       std::to_string(bound));
  }
  return report;
}

Mat regauge(const Mat& x, const Vec& nullvector, Gauge gauge) {
  const Vec g = gauge_row(gauge, x.rows());
  const double gv = g.dot(nullvector);
  if (gv == 0.0) throw Error(Errc::SolveFailed, "gauge is blind to the nullspace");
  Mat out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) out.col(j) -= (g.dot(x.col(j)) / gv) * nullvector;
  return out;
}

Vec stationary_from_system(const SingularSystem& l_system) {
  Vec pi = l_system.left_nullvector();
  pi /= pi.sum();
  const SpMat& l = l_system.matrix();
  const double scale = l.nonZeros() ? l.coeffs().cwiseAbs().maxCoeff() : 0.0;
  const double residual = (l.transpose() * pi).cwiseAbs().maxCoeff();
  if (residual > 1e-11 * scale) {
    throw Error(Errc::SolveFailed, "stationary residual " + std::to_string(residual));
  }
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (!(pi[i] > 0.0)) {
      throw Error(Errc::NonPositiveEntry, "stationary vector entry " + std::to_string(i) + " is " +
                                              std::to_string(pi[i]));
    }
  }
  return pi;
}

Vec stationary_nullvector(const SpMat& l_transpose, Backend backend) {
  return stationary_from_system(SingularSystem(SpMat(l_transpose.transpose()), backend));
}

Vec stationary_nullvector(const Mat& l_transpose, Backend backend) {
  return stationary_nullvector(SpMat(l_transpose.sparseView()), backend);
}

SingularSolveReport solve_singular_consistent(const Mat& a, const Mat& b, Gauge gauge, Backend backend) {
  SingularSystem sys(a, backend);
  return sys.solve(b, gauge);
}

}  // namespace homog
