#include "homog/homogenize.hpp"

#include "homog/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace homog {

namespace {

Mat edge_jumps(const QuotientGraph& g) {
  Mat nu(g.num_edges(), g.dimension());
  for (int e = 0; e < g.num_edges(); ++e) nu.row(e) = g.edge(e).jump.transpose();
  return nu;
}

double max_edge_flux(const QuotientGraph& g) {
  double m = 0.0;
  for (const auto& e : g.edges()) m = std::max(m, e.jump.cwiseAbs().maxCoeff() * e.rate);
  return m;
}

const SingularSystem& ensure_system(const QuotientGraph& g, const SingularSystem* given,
                                    std::optional<SingularSystem>& owned) {
  if (given) return *given;
  owned.emplace(build_rate_matrix(g).entries);
  return *owned;
}

}  // namespace

Mat drift_field(const QuotientGraph& g) {
  Mat rho = Mat::Zero(g.num_nodes(), g.dimension());
  for (const auto& e : g.edges()) rho.row(e.origin) += e.jump.transpose() * e.rate;
  return rho;
}

LongRunDrift long_run_drift_forms(const QuotientGraph& g, const Vec& pi) {
  LongRunDrift out;
  out.node_form = drift_field(g).transpose() * pi;
  out.edge_form = Vec::Zero(g.dimension());
  for (const auto& e : g.edges()) out.edge_form += e.jump * e.rate * pi[e.origin];
  return out;
}

Vec long_run_drift(const QuotientGraph& g, const Vec& pi) {
  const LongRunDrift forms = long_run_drift_forms(g, pi);
  const double gap = (forms.node_form - forms.edge_form).cwiseAbs().maxCoeff();
  if (gap > 1e-12 * (1.0 + max_edge_flux(g))) {
    throw Error(Errc::InvariantViolated, "node and edge forms of the drift differ by " + std::to_string(gap));
  }
  return forms.node_form;
}

NullDriftCheck check_null_drift(const QuotientGraph& g, const Vec& pi, double tol) {
  NullDriftCheck c;
  c.magnitude = long_run_drift(g, pi).cwiseAbs().maxCoeff();
  c.threshold = tol * (1.0 + max_edge_flux(g));
  c.holds = c.magnitude <= c.threshold;
  return c;
}

std::string DetailedBalanceCheck::reason() const {
  switch (status) {
    case BalanceStatus::Holds: return "holds";
    case BalanceStatus::MissingReversal: return "missing reversal";
    case BalanceStatus::Numeric: return "flux mismatch";
  }
  return "?";
}

DetailedBalanceCheck check_detailed_balance(const QuotientGraph& g, const Vec& pi, double tol) {
  DetailedBalanceCheck out;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (!g.edge(e).reversal) out.violating_edges.push_back(e);
  }
  if (!out.violating_edges.empty()) {
    out.status = BalanceStatus::MissingReversal;
    return out;
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& fwd = g.edge(e);
    const auto& back = g.edge(*fwd.reversal);
    const double a = fwd.rate * pi[fwd.origin];
    const double b = back.rate * pi[back.origin];
    if (std::fabs(a - b) > tol * std::max(a, b)) out.violating_edges.push_back(e);
  }
  out.status = out.violating_edges.empty() ? BalanceStatus::Holds : BalanceStatus::Numeric;
  return out;
}

SymmetryCheck check_symmetry_null_drift(const QuotientGraph& g, const std::vector<std::vector<int>>& phis) {
  const int n = g.num_nodes();
  const int d = g.dimension();
  if (static_cast<int>(phis.size()) != d) {
    throw Error(Errc::NotAPermutation, "need one map per axis, got " + std::to_string(phis.size()));
  }
  for (std::size_t i = 0; i < phis.size(); ++i) {
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    if (static_cast<int>(phis[i].size()) != n) throw Error(Errc::NotAPermutation, "map " + std::to_string(i) + " has wrong length");
    for (int v : phis[i]) {
      if (v < 0 || v >= n || hit[static_cast<std::size_t>(v)]) {
        throw Error(Errc::NotAPermutation, "map " + std::to_string(i) + " is not a bijection");
      }
      hit[static_cast<std::size_t>(v)] = 1;
    }
  }

  const SpMat l = build_rate_matrix(g).entries;
  const Mat rho = drift_field(g);
  const double l_scale = l.nonZeros() ? l.coeffs().cwiseAbs().maxCoeff() : 0.0;
  const double rho_scale = rho.size() ? rho.cwiseAbs().maxCoeff() : 0.0;

  SymmetryCheck out;
  out.overall = true;
  for (int i = 0; i < d; ++i) {
    const auto& phi = phis[static_cast<std::size_t>(i)];
    auto at = [&](int y) { return phi[static_cast<std::size_t>(y)]; };
    bool inv = true;
    for (int y = 0; y < n; ++y) inv = inv && at(at(y)) == y;

    bool sym = inv;
    for (int k = 0; sym && k < l.outerSize(); ++k) {
      for (SpMat::InnerIterator it(l, k); it; ++it) {
        const double mapped = l.coeff(at(static_cast<int>(it.row())), at(static_cast<int>(it.col())));
        if (std::fabs(mapped - it.value()) > 1e-12 * l_scale) {
          sym = false;
          break;
        }
      }
    }

    bool neg = true;
    for (int y = 0; y < n; ++y) {
      if (std::fabs(rho(at(y), i) + rho(y, i)) > 1e-12 * (1.0 + rho_scale)) {
        neg = false;
        break;
      }
    }
    out.involution.push_back(inv);
    out.generator_invariant.push_back(sym);
    out.negates_drift.push_back(neg);
    out.axis_pass.push_back(inv && sym && neg);
    out.overall = out.overall && inv && sym && neg;
  }
  return out;
}

Mat corrector_psi(const QuotientGraph& g, const Vec& pi, const SingularSystem* system, Gauge gauge, bool centered) {
  std::optional<SingularSystem> owned;
  const SingularSystem& sys = ensure_system(g, system, owned);
  Mat rhs = drift_field(g);
  if (centered) rhs.rowwise() -= long_run_drift(g, pi).transpose();
  return sys.solve(rhs, gauge).solution;
}

DiffusivityC diffusivity_C(const QuotientGraph& g, const Vec& pi, const Mat& psi) {
  const int d = g.dimension();
  DiffusivityC out;
  out.alpha = edge_jumps(g);
  out.C = Mat::Zero(d, d);
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    out.alpha.row(e) -= psi.row(edge.terminal) - psi.row(edge.origin);
    const Vec a = out.alpha.row(e).transpose();
    out.C += a * a.transpose() * (edge.rate * pi[edge.origin]);
  }
  out.C *= 0.5;
  out.C = 0.5 * (out.C + out.C.transpose()).eval();
  out.alpha_spans = span_rank(out.alpha, 1e-10, edge_jumps(g).norm()) == d;
  return out;
}

Mat unit_cell_sigma(const QuotientGraph& g, const Vec& pi) {
  Mat sigma = Mat::Zero(g.num_nodes(), g.dimension());
  double scale = 0.0;
  for (const auto& e : g.edges()) {
    sigma.row(e.terminal) += e.jump.transpose() * (e.rate * pi[e.origin]);
    scale += e.jump.cwiseAbs().maxCoeff() * e.rate * pi[e.origin];
  }
  const Vec total = sigma.colwise().sum().transpose();
  const double gap = (total - long_run_drift(g, pi)).cwiseAbs().maxCoeff();
  if (gap > 1e-12 * (1.0 + scale)) {
    throw Error(Errc::InvariantViolated, "sum of sigma differs from the long-run drift by " + std::to_string(gap));
  }
  return sigma;
}

Mat unit_cell_omega(const QuotientGraph& g, const Vec& pi, const SingularSystem* system, Gauge gauge) {
  std::optional<SingularSystem> owned;
  const SingularSystem& sys = ensure_system(g, system, owned);
  return sys.solve(unit_cell_sigma(g, pi), gauge, true).solution;
}

Mat diffusivity_K(const QuotientGraph& g, const Vec& pi, const Mat& omega) {
  const int d = g.dimension();
  Mat k = Mat::Zero(d, d);
  for (const auto& e : g.edges()) {
    const Vec w = omega.row(e.origin).transpose();
    k += (e.jump * e.jump.transpose() * pi[e.origin] - e.jump * w.transpose() - w * e.jump.transpose()) * e.rate;
  }
  k *= 0.5;
  return 0.5 * (k + k.transpose());
}

bool positive_definite(const Mat& m, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  const Vec ev = es.eigenvalues();
  return ev.minCoeff() > rel_tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

int span_rank(const Mat& rows, double rel_tol, double scale) {
  if (rows.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(rows);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double cut = rel_tol * std::max(s[0], scale);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > cut ? 1 : 0;
  return r;
}

double matrix_inf_norm(const Mat& m) { return m.size() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

HomogenizationResult analyze(const QuotientGraph& g, const AnalyzeOptions& options) {
  HomogenizationResult r;
  r.dimension = g.dimension();
  const RateMatrix l = build_rate_matrix(g);
  const SingularSystem sys(l.entries, options.backend, options.parallel);
  r.backend = sys.backend();

  r.pi = stationary_from_system(sys);
  r.rho = drift_field(g);
  r.u_bar = long_run_drift(g, r.pi);
  const NullDriftCheck nd = check_null_drift(g, r.pi, options.tolerance);
  r.u_bar_norm = nd.magnitude;
  r.checks.null_drift = nd.holds;
  r.checks.detailed_balance = check_detailed_balance(g, r.pi, options.tolerance);
  r.centered = !nd.holds;

  r.psi = corrector_psi(g, r.pi, &sys, options.gauge, r.centered);
  Mat psi_rhs = r.rho;
  if (r.centered) psi_rhs.rowwise() -= r.u_bar.transpose();
  r.psi_residual = (apply_generator(g, r.psi) - psi_rhs).cwiseAbs().maxCoeff();

  DiffusivityC c = diffusivity_C(g, r.pi, r.psi);
  r.C = std::move(c.C);
  r.alpha = std::move(c.alpha);
  r.checks.alpha_spans = c.alpha_spans;
  r.checks.C_positive_definite = positive_definite(r.C);

  r.sigma = unit_cell_sigma(g, r.pi);
  if (!r.centered) {
    r.omega = sys.solve(r.sigma, options.gauge, true).solution;
    r.omega_residual = (apply_generator_transpose(g, *r.omega) - r.sigma).cwiseAbs().maxCoeff();
    r.K = diffusivity_K(g, r.pi, *r.omega);
    r.checks.K_equals_C = matrix_inf_norm(*r.K - r.C) <= 1e-9 * (1.0 + matrix_inf_norm(r.C));
  }
  return r;
}

}  // namespace homog
