#include "homog/variational.hpp"

#include "homog/error.hpp"
#include "homog/homogenize.hpp"
#include "homog/rate_matrix.hpp"
#include "homog/solvers.hpp"

#include <cmath>
#include <random>

namespace homog {

bool is_reversible(const QuotientGraph& g) {
  for (const auto& e : g.edges()) {
    if (!e.reversal) return false;
    if (std::fabs(e.rate - g.edge(*e.reversal).rate) > 1e-12 * e.rate) return false;
  }
  return true;
}

void require_reversible(const QuotientGraph& g) {
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    if (!edge.reversal) throw Error(Errc::NotReversible, "edge " + std::to_string(e) + " has no reversal");
    if (std::fabs(edge.rate - g.edge(*edge.reversal).rate) > 1e-12 * edge.rate) {
      throw Error(Errc::NotReversible, "edge " + std::to_string(e) + " and its reversal carry different rates");
    }
  }
}

Mat gradient(const QuotientGraph& g, const Vec& f) {
  require_reversible(g);
  Mat out(g.num_edges(), g.dimension());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    out.row(e) = ((f[edge.terminal] - f[edge.origin]) / edge.jump.squaredNorm()) * edge.jump.transpose();
  }
  return out;
}

Vec divergence(const QuotientGraph& g, const Mat& F) {
  require_reversible(g);
  Vec out = Vec::Zero(g.num_nodes());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    out[edge.origin] += edge.jump.dot(F.row(e).transpose()) / edge.jump.squaredNorm();
  }
  return out;
}

std::vector<Mat> edge_matrices(const QuotientGraph& g) {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(g.num_edges()));
  for (const auto& e : g.edges()) out.push_back(e.jump * e.jump.transpose() * e.rate);
  return out;
}

Mat apply_edge_matrices(const QuotientGraph& g, const Mat& F) {
  Mat out(F.rows(), F.cols());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    out.row(e) = (edge.rate * edge.jump.dot(F.row(e).transpose())) * edge.jump.transpose();
  }
  return out;
}

double field_inner(const Mat& F, const Mat& G) { return (F.array() * G.array()).sum(); }

double divergence_theorem_check(const QuotientGraph& g, const Mat& F, const Vec& G) {
  require_reversible(g);
  const double f_scale = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
  const double g_scale = G.size() ? G.cwiseAbs().maxCoeff() : 0.0;

  bool symmetric = true;
  bool antisymmetric = true;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    if ((F.row(e) - F.row(*edge.reversal)).cwiseAbs().maxCoeff() > 1e-12 * f_scale) symmetric = false;
    if (std::fabs(G[edge.terminal] + G[edge.origin]) > 1e-12 * g_scale) antisymmetric = false;
  }
  if (!symmetric && !antisymmetric) {
    throw Error(Errc::ConditionNotMet, "field is not reversal-symmetric and the node function is not antisymmetric");
  }
  return std::fabs(field_inner(F, gradient(g, G)) + 2.0 * divergence(g, F).dot(G));
}

DivergenceFormSolution unit_cell_divergence_form(const QuotientGraph& g, const Vec& xi) {
  require_reversible(g);
  const int n = g.num_nodes();
  const int m = g.num_edges();
  const Mat shift = Mat::Constant(1, 1, 1.0 / n) * Mat(xi.transpose());
  const Mat constant_field = shift.replicate(m, 1);

  // div(A∇Υ) = LΥ, so the divergence form reads LΥ = −div(Aξ)/|S|.
  const Vec rhs = -divergence(g, apply_edge_matrices(g, constant_field));
  const SingularSystem sys(build_rate_matrix(g).entries);

  DivergenceFormSolution out;
  out.upsilon = sys.solve(rhs, Gauge::MeanZero).solution.col(0);
  const Mat flux = apply_edge_matrices(g, gradient(g, out.upsilon) + constant_field);
  out.divergence_residual = divergence(g, flux).cwiseAbs().maxCoeff();

  const Vec pi = Vec::Constant(n, 1.0 / n);
  const Vec xi_sigma = unit_cell_sigma(g, pi) * xi;
  out.transpose_residual = (apply_generator_transpose(g, out.upsilon) - xi_sigma).cwiseAbs().maxCoeff();
  return out;
}

namespace {

Mat shifted_gradient(const QuotientGraph& g, const Vec& xi, const Vec& phi) {
  Mat grad = gradient(g, phi);
  grad.rowwise() += xi.transpose() / static_cast<double>(g.num_nodes());
  return grad;
}

}  // namespace

double energy(const QuotientGraph& g, const Vec& xi, const Vec& phi) {
  const Mat t = shifted_gradient(g, xi, phi);
  return 0.5 * g.num_nodes() * field_inner(apply_edge_matrices(g, t), t);
}

double energy_directional_derivative(const QuotientGraph& g, const Vec& xi, const Vec& phi, const Vec& delta) {
  return field_inner(gradient(g, delta), apply_edge_matrices(g, shifted_gradient(g, xi, phi)));
}

bool verify_minimizer(const QuotientGraph& g, const Vec& xi, const Vec& phi_star, int n_perturbations,
                      std::uint64_t seed) {
  require_reversible(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double base = energy(g, xi, phi_star);
  const double scale = 1.0 + (phi_star.size() ? phi_star.cwiseAbs().maxCoeff() : 0.0);
  const Mat flux = apply_edge_matrices(g, shifted_gradient(g, xi, phi_star));
  const double flux_norm = flux.norm();

  for (int k = 0; k < n_perturbations; ++k) {
    Vec delta(g.num_nodes());
    for (Eigen::Index i = 0; i < delta.size(); ++i) delta[i] = normal(rng) * 1e-2 * scale;
    if (energy(g, xi, phi_star + delta) < base - 1e-12 * (1.0 + base)) return false;
    const Mat grad_delta = gradient(g, delta);
    const double derivative = field_inner(grad_delta, flux);
    if (std::fabs(derivative) > 1e-9 * (1.0 + grad_delta.norm() * flux_norm)) return false;
  }
  return true;
}

Vec k_times(const QuotientGraph& g, const Vec& xi, const Vec& upsilon) {
  const Mat flux = apply_edge_matrices(g, shifted_gradient(g, xi, upsilon));
  return 0.5 * flux.colwise().sum().transpose();
}

double k_quadratic_form(const QuotientGraph& g, const Vec& xi, const Mat& omega) {
  const Vec phi = omega * xi;
  const Mat t = shifted_gradient(g, xi, phi);
  double sum = 0.0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    const double p = edge.jump.dot(t.row(e).transpose());
    sum += edge.rate * p * p;
  }
  return 0.5 * g.num_nodes() * sum;
}

Mat k_definiteness_vectors(const QuotientGraph& g, const Mat& omega) {
  Mat out(g.num_edges(), g.dimension());
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    out.row(e) = omega.row(edge.terminal) - omega.row(edge.origin) + edge.jump.transpose() / g.num_nodes();
  }
  return out;
}

bool edge_condition_holds(const QuotientGraph& g, const Mat& omega, const Vec& xi, double rel_tol) {
  const Mat w = k_definiteness_vectors(g, omega);
  const double scale = w.size() ? w.cwiseAbs().maxCoeff() * xi.norm() : 0.0;
  return (w * xi).cwiseAbs().maxCoeff() > rel_tol * scale;
}

}  // namespace homog
