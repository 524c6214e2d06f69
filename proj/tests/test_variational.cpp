#include <doctest.h>

#include "homog/error.hpp"
#include "homog/geometry.hpp"
#include "homog/homogenize.hpp"
#include "homog/rate_matrix.hpp"
#include "homog/variational.hpp"
#include "support.hpp"

#include <functional>

using namespace homog;
using homog::testing::Family;
using homog::testing::GraphFactory;

namespace {

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

std::vector<QuotientGraph> reversible_graphs() {
  std::vector<QuotientGraph> out;
  out.push_back(testing::one_node_walk(1.5, 1.5));
  out.push_back(testing::two_node_chain(2.0, 2.0));
  out.push_back(build_obstructed_lattice(4, ObstructionSpec::none()));
  for (int n : {2, 4, 8, 16}) out.push_back(build_obstructed_lattice(n));
  out.push_back(build_diagonal_lattice(8));
  GraphFactory f(71);
  for (int k = 0; k < 15; ++k) out.push_back(f.make(Family::Reversible, 12));
  return out;
}

std::vector<Vec> directions(int d) {
  std::vector<Vec> xs;
  for (int i = 0; i < d; ++i) xs.push_back(Vec::Unit(d, i));
  xs.push_back(Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
  return xs;
}

}  // namespace

TEST_CASE("reversibility detection") {
  CHECK(is_reversible(testing::one_node_walk(1.0, 1.0)));
  CHECK_FALSE(is_reversible(testing::one_node_walk(1.0, 1.0 + 1e-9)));
  CHECK(is_reversible(testing::one_node_walk(1.0, 1.0 + 1e-13)));
  CHECK_FALSE(is_reversible(whirlpool_fixture(1.0)));
  CHECK_FALSE(is_reversible(build_obstructed_lattice(8, ObstructionSpec::square_quadrant(), InteractionKind::Bonding)));
  const QuotientGraph w = whirlpool_fixture(1.0);
  Vec ind = Vec::Zero(8);
  ind[0] = 1.0;
  CHECK(error_of([&] { gradient(w, ind); }) == Errc::NotReversible);
  CHECK(error_of([&] { divergence(w, Mat::Zero(8, 2)); }) == Errc::NotReversible);
  CHECK(error_of([&] { energy(w, Vec::Unit(2, 0), ind); }) == Errc::NotReversible);
  CHECK(error_of([&] { unit_cell_divergence_form(w, Vec::Unit(2, 0)); }) == Errc::NotReversible);
}

TEST_CASE("gradient on the two node chain") {
  const QuotientGraph g = testing::two_node_chain(1.0, 1.0);
  Vec f(2);
  f << 0, 1;
  const Mat grad = gradient(g, f);
  // (f(∂₊e) − f(∂₋e)) ν/|ν|² with |ν|² = 1/4.
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    const double expected = (f[edge.terminal] - f[edge.origin]) * edge.jump[0] * 4.0;
    CHECK(grad(e, 0) == doctest::Approx(expected));
    CHECK(std::fabs(grad(e, 0)) == doctest::Approx(2.0));
  }
  CHECK(gradient(g, Vec::Constant(2, 3.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence examples") {
  const QuotientGraph g = testing::two_node_chain(1.0, 1.0);
  CHECK(divergence(g, Mat::Zero(4, 1)).cwiseAbs().maxCoeff() == 0.0);
  // Constant field c: Σ ν c/|ν|², here (½c − ½c)/¼ = 0 at each node.
  CHECK(divergence(g, Mat::Constant(4, 1, 2.5)).cwiseAbs().maxCoeff() < 1e-15);
  // A field on the +½ edges only: div = ½·c/¼ = 2c at each node.
  Mat f = Mat::Zero(4, 1);
  for (int e = 0; e < 4; ++e)
    if (g.edge(e).jump[0] > 0) f(e, 0) = 1.5;
  CHECK((divergence(g, f).array() - 3.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("div(A grad f) equals Lf") {
  Rng rng(73);
  for (const auto& g : reversible_graphs()) {
    for (int t = 0; t < 5; ++t) {
      const Vec f = testing::random_vec(rng, g.num_nodes());
      const Vec lhs = divergence(g, apply_edge_matrices(g, gradient(g, f)));
      const Vec rhs = apply_generator(g, f).col(0);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("edge matrices") {
  const QuotientGraph g = build_obstructed_lattice(8);
  const auto a = edge_matrices(g);
  for (int e = 0; e < g.num_edges(); ++e) {
    CHECK((a[e] - a[e].transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a[e] - a[*g.edge(e).reversal]).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(a[e]);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(std::fabs(es.eigenvalues()[0]) < 1e-12);  // rank one in 2-D
  }
}

TEST_CASE("divergence theorem") {
  Rng rng(79);
  for (const auto& g : reversible_graphs()) {
    const Vec f = testing::random_vec(rng, g.num_nodes());
    const Vec gg = testing::random_vec(rng, g.num_nodes());
    const Mat field = apply_edge_matrices(g, gradient(g, f));
    const double scale = 1.0 + field.cwiseAbs().maxCoeff() * gradient(g, gg).cwiseAbs().maxCoeff() * g.num_edges();
    CHECK(divergence_theorem_check(g, field, gg) <= 1e-12 * scale);
  }
  // Antisymmetric node function on a bipartite chain, arbitrary field.
  const QuotientGraph c = testing::two_node_chain(1.0, 1.0);
  Vec anti(2);
  anti << 1, -1;
  const Mat rough = testing::random_mat(rng, 4, 1);
  CHECK(divergence_theorem_check(c, rough, anti) < 1e-12 * (1 + rough.cwiseAbs().maxCoeff()));
  // Neither hypothesis.
  const QuotientGraph g = build_obstructed_lattice(4);
  CHECK(error_of([&] {
          divergence_theorem_check(g, testing::random_mat(rng, g.num_edges(), 2), testing::random_vec(rng, g.num_nodes()));
        }) == Errc::ConditionNotMet);
}

TEST_CASE("sum identity for antisymmetric edge functions") {
  Rng rng(83);
  GraphFactory f(84);
  for (int k = 0; k < 20; ++k) {
    const QuotientGraph g = f.make(Family::Reversible, 12);
    Vec h = Vec::Zero(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
      const int r = *g.edge(e).reversal;
      if (e < r) {
        h[e] = 2 * uniform01(rng) - 1;
        h[r] = -h[e];
      }
    }
    const Vec gg = testing::random_vec(rng, g.num_nodes());
    double lhs = 0, rhs = 0;
    for (int e = 0; e < g.num_edges(); ++e) {
      lhs += h[e] * (gg[g.edge(e).terminal] - gg[g.edge(e).origin]);
      rhs += -2.0 * h[e] * gg[g.edge(e).origin];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("unit cell problem in divergence form") {
  const QuotientGraph g8 = build_obstructed_lattice(8);
  CHECK(unit_cell_divergence_form(g8, Vec::Zero(2)).upsilon.cwiseAbs().maxCoeff() == 0.0);

  const QuotientGraph free4 = build_obstructed_lattice(4, ObstructionSpec::none());
  for (const Vec& xi : directions(2)) CHECK(unit_cell_divergence_form(free4, xi).upsilon.cwiseAbs().maxCoeff() < 1e-13);

  for (const auto& g : reversible_graphs()) {
    const int d = g.dimension();
    const Vec p = Vec::Constant(g.num_nodes(), 1.0 / g.num_nodes());
    Mat om = unit_cell_omega(g, p);
    om.rowwise() -= om.colwise().mean();
    for (const Vec& xi : directions(d)) {
      const auto s = unit_cell_divergence_form(g, xi);
      CHECK(s.divergence_residual <= 1e-10);
      CHECK(s.transpose_residual <= 1e-10);
      Vec ups = s.upsilon;
      ups.array() -= ups.mean();
      CHECK((ups - om * xi).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("energy") {
  const QuotientGraph g8 = build_obstructed_lattice(8);
  CHECK(energy(g8, Vec::Zero(2), Vec::Zero(g8.num_nodes())) == 0.0);

  // One-node lattice, φ = 0, ξ = e₁: ½·Σ λ (νᵀe₁)² = ½·2 = 1 = K₁₁.
  Vec e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  const QuotientGraph one =
      build_quotient_graph(2, {Vec::Zero(2)}, {{0, e1, 1.0}, {0, -e1, 1.0}, {0, e2, 1.0}, {0, -e2, 1.0}});
  CHECK(energy(one, e1, Vec::Zero(1)) == doctest::Approx(1.0));

  Rng rng(89);
  for (const auto& g : reversible_graphs()) {
    const auto r = analyze(g);
    for (const Vec& xi : directions(g.dimension())) {
      const auto s = unit_cell_divergence_form(g, xi);
      const double q = xi.dot(*r.K * xi);
      CHECK(std::fabs(energy(g, xi, s.upsilon) - q) <= 1e-9 * (1 + q));
      CHECK(energy(g, xi, testing::random_vec(rng, g.num_nodes())) >= 0.0);
    }
  }
}

TEST_CASE("minimizer verification") {
  for (const auto& g : reversible_graphs()) {
    for (const Vec& xi : directions(g.dimension())) {
      const Vec ups = unit_cell_divergence_form(g, xi).upsilon;
      CHECK(verify_minimizer(g, xi, ups, 100, 5));
    }
  }
  const QuotientGraph g8 = build_obstructed_lattice(8);
  const Vec xi = Vec::Unit(2, 0);
  Vec spiked = unit_cell_divergence_form(g8, xi).upsilon;
  const double before = energy(g8, xi, spiked);
  spiked[3] += 0.2;
  CHECK(energy(g8, xi, spiked) > before);
  CHECK_FALSE(verify_minimizer(g8, xi, spiked, 100, 5));
  CHECK(verify_minimizer(g8, Vec::Zero(2), Vec::Zero(g8.num_nodes()), 100, 5));
}

TEST_CASE("K representations") {
  Rng rng(97);
  for (const auto& g : reversible_graphs()) {
    const int d = g.dimension();
    const auto r = analyze(g);
    const Mat& k = *r.K;
    std::vector<Vec> xs = directions(d);
    for (int t = 0; t < 5; ++t) xs.push_back(testing::random_vec(rng, d));
    for (const Vec& xi : xs) {
      const auto s = unit_cell_divergence_form(g, xi);
      CHECK((k_times(g, xi, s.upsilon) - k * xi).cwiseAbs().maxCoeff() <= 1e-10 * (1 + k.cwiseAbs().maxCoeff()));
      CHECK(std::fabs(k_quadratic_form(g, xi, *r.omega) - xi.dot(k * xi)) <= 1e-10 * (1 + k.cwiseAbs().maxCoeff()));
      const bool positive = xi.dot(k * xi) > 1e-10 * (1 + k.cwiseAbs().maxCoeff());
      CHECK(edge_condition_holds(g, *r.omega, xi) == positive);
    }
  }
  // Rank-one example: a walk along e₁ only has no edge seeing e₂.
  Vec e1(2);
  e1 << 1, 0;
  const QuotientGraph line = build_quotient_graph(2, {Vec::Zero(2)}, {{0, e1, 1.0}, {0, -e1, 1.0}});
  const auto r = analyze(line);
  CHECK(edge_condition_holds(line, *r.omega, Vec::Unit(2, 0)));
  CHECK_FALSE(edge_condition_holds(line, *r.omega, Vec::Unit(2, 1)));
  CHECK(k_definiteness_vectors(line, *r.omega).col(1).cwiseAbs().maxCoeff() == 0.0);
}
