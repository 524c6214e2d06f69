#include <doctest.h>

#include "homog/error.hpp"
#include "homog/geometry.hpp"
#include "homog/graph.hpp"
#include "homog/graph_io.hpp"
#include "support.hpp"

#include <functional>

using namespace homog;
using homog::testing::Family;
using homog::testing::GraphFactory;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("one node symmetric walk on Z") {
  const QuotientGraph g = testing::one_node_walk(1.0, 1.0);
  CHECK(g.num_nodes() == 1);
  CHECK(g.num_edges() == 2);
  CHECK(g.edge(0).reversal == 1);
  CHECK(g.edge(1).reversal == 0);
  CHECK(g.edge(0).terminal == 0);
}

TEST_CASE("whirlpool has no reversals") {
  const QuotientGraph g = whirlpool_fixture(1.0);
  CHECK(g.num_nodes() == 8);
  CHECK(g.num_edges() == 8);
  for (const auto& e : g.edges()) CHECK_FALSE(e.reversal.has_value());
}

TEST_CASE("connectivity") {
  // A single node reaches itself, even with a one-directional drift.
  CHECK_NOTHROW(build_quotient_graph(2, {v2(0, 0)}, {{0, v2(1, 0), 1.0}}));
  CHECK(error_of([] { build_quotient_graph(2, {v2(0, 0), v2(0.5, 0.5)}, {{0, v2(1, 0), 1.0}, {1, v2(1, 0), 1.0}}); }) ==
        Errc::NotStronglyConnected);
  // Reachable forwards only.
  CHECK(error_of([] { build_quotient_graph(1, {v1(0), v1(0.5)}, {{0, v1(0.5), 1.0}, {1, v1(1), 1.0}}); }) ==
        Errc::NotStronglyConnected);
}

TEST_CASE("every validation error is reachable") {
  CHECK(error_of([] { build_quotient_graph(1, {v1(0), v1(1e-10)}, {}); }) == Errc::DuplicateNode);
  CHECK(error_of([] { build_quotient_graph(1, {v1(0)}, {{0, v1(0.3), 1.0}}); }) == Errc::DanglingEdge);
  CHECK(error_of([] { build_quotient_graph(1, {v1(0)}, {{0, v1(0.0), 1.0}}); }) == Errc::SelfEdge);
  CHECK(error_of([] { build_quotient_graph(1, {v1(0)}, {{0, v1(1.0), 0.0}}); }) == Errc::NonPositiveRate);
  CHECK(error_of([] { build_quotient_graph(1, {v1(0)}, {{0, v1(1.0), -2.0}}); }) == Errc::NonPositiveRate);
  CHECK(error_of([] { build_quotient_graph(1, {v1(0)}, {{0, v1(1.0), 1.0}, {0, v1(1.0), 2.0}}); }) == Errc::DuplicateEdge);
  CHECK(error_of([] { build_quotient_graph(1, {}, {}); }) == Errc::EmptyGraph);
}

TEST_CASE("parallel edges with distinct jumps are kept") {
  const QuotientGraph g =
      build_quotient_graph(1, {v1(0), v1(0.5)}, {{0, v1(0.5), 1.0}, {0, v1(-0.5), 1.0}, {1, v1(0.5), 1.0}});
  CHECK(g.num_edges() == 3);
  CHECK(g.edge(0).terminal == 1);
  CHECK(g.edge(1).terminal == 1);
}

TEST_CASE("projected edge map") {
  SUBCASE("single node collapses pairs") {
    const auto m = project_edges(testing::one_node_walk(1.0, 1.0));
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<int, int>{0, 0});
    CHECK_FALSE(m.bijective);
    CHECK(m.aggregated_rates[0] == doctest::Approx(2.0));
  }
  SUBCASE("two node chain with one edge per pair") {
    const QuotientGraph g = build_quotient_graph(1, {v1(0), v1(0.5)}, {{0, v1(0.5), 1.0}, {1, v1(-0.5), 1.0}});
    const auto m = project_edges(g);
    CHECK(m.bijective);
    CHECK(m.commutes_with_reversals);
  }
  SUBCASE("whirlpool") {
    const auto m = project_edges(whirlpool_fixture(1.0));
    CHECK(m.pairs.size() == 8);
    CHECK(m.bijective);
  }
  SUBCASE("aggregated rates sum member rates") {
    GraphFactory f(7);
    for (int k = 0; k < 20; ++k) {
      const QuotientGraph g = f.make(Family::Arbitrary, 8);
      const auto m = project_edges(g);
      std::vector<double> sums(m.pairs.size(), 0.0);
      std::vector<char> hit(m.pairs.size(), 0);
      for (int e = 0; e < g.num_edges(); ++e) {
        const auto p = static_cast<std::size_t>(m.kappa[static_cast<std::size_t>(e)]);
        CHECK(m.pairs[p] == std::pair<int, int>{g.edge(e).origin, g.edge(e).terminal});
        sums[p] += g.edge(e).rate;
        hit[p] = 1;
      }
      for (std::size_t p = 0; p < sums.size(); ++p) {
        CHECK(hit[p]);
        CHECK(sums[p] == doctest::Approx(m.aggregated_rates[p]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("lifted displacement") {
  const QuotientGraph w = whirlpool_fixture(1.0);
  CHECK(lift_displacement(w, std::vector<int>{}).norm() == 0.0);

  // Follow the cycle from node 0.
  std::vector<int> path;
  int y = 0;
  for (int k = 0; k < 8; ++k) {
    const int e = w.out_edges(y)[0];
    path.push_back(e);
    y = w.edge(e).terminal;
  }
  CHECK(y == 0);
  CHECK(lift_displacement(w, path).cwiseAbs().maxCoeff() < 1e-15);

  const QuotientGraph z = testing::one_node_walk(1.0, 1.0);
  CHECK(lift_displacement(z, std::vector<int>{0, 0, 1})[0] == doctest::Approx(1.0));

  const QuotientGraph c =
      build_quotient_graph(1, {v1(0), v1(0.5)}, {{0, v1(0.5), 1.0}, {1, v1(0.5), 1.0}});
  CHECK(error_of([&] { lift_displacement(c, std::vector<int>{0, 0}); }) == Errc::BrokenPath);
}

TEST_CASE("reversal is an involution and the edge sum identities hold") {
  GraphFactory f(11);
  for (int k = 0; k < 30; ++k) {
    const QuotientGraph g = f.make(k % 2 ? Family::Reversible : Family::Arbitrary, 10);
    Vec by_edges = Vec::Zero(2), by_out = Vec::Zero(2), by_in = Vec::Zero(2);
    Mat q_edges = Mat::Zero(2, 2), q_out = Mat::Zero(2, 2), q_in = Mat::Zero(2, 2);
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto& edge = g.edge(e);
      if (edge.reversal) {
        CHECK(g.edge(*edge.reversal).reversal == e);
        CHECK((g.edge(*edge.reversal).jump + edge.jump).norm() == 0.0);
        CHECK(g.edge(*edge.reversal).origin == edge.terminal);
      }
      by_edges += edge.jump;
      q_edges += edge.rate * edge.jump * edge.jump.transpose();
    }
    for (int y = 0; y < g.num_nodes(); ++y) {
      for (int e : g.out_edges(y)) {
        by_out += g.edge(e).jump;
        q_out += g.edge(e).rate * g.edge(e).jump * g.edge(e).jump.transpose();
      }
      for (int e : g.in_edges(y)) {
        by_in += g.edge(e).jump;
        q_in += g.edge(e).rate * g.edge(e).jump * g.edge(e).jump.transpose();
      }
    }
    CHECK((by_edges - by_out).norm() < 1e-12);
    CHECK((by_edges - by_in).norm() < 1e-12);
    CHECK((q_edges - q_out).norm() < 1e-12);
    CHECK((q_edges - q_in).norm() < 1e-12);
  }
}

TEST_CASE("terminal coordinates match origin plus jump modulo one") {
  GraphFactory f(3);
  for (int k = 0; k < 20; ++k) {
    const QuotientGraph g = f.make(Family::Arbitrary, 10);
    for (const auto& e : g.edges()) {
      CHECK(torus_distance(wrap_unit_cell(g.node(e.origin).coords + e.jump), g.node(e.terminal).coords) < 1e-9);
    }
    for (const auto& n : g.nodes()) {
      CHECK(n.coords.minCoeff() >= 0.0);
      CHECK(n.coords.maxCoeff() < 1.0);
    }
  }
}

TEST_CASE("node snap is stable under small perturbations") {
  const QuotientGraph g = build_obstructed_lattice(8);
  Rng rng(5);
  for (int y = 0; y < g.num_nodes(); ++y) {
    Vec p = g.node(y).coords;
    for (int i = 0; i < 2; ++i) p[i] += (uniform01(rng) - 0.5) * 0.99e-9;
    // Also across the periodic seam.
    p[0] += (y % 3) - 1;
    CHECK(g.find_node(p) == y);
  }
  Vec off = g.node(0).coords;
  off[0] += 1e-3;
  CHECK_FALSE(g.find_node(off).has_value());
}

TEST_CASE("graph file round trip is byte identical") {
  GraphFactory f(21);
  for (int k = 0; k < 20; ++k) {
    const QuotientGraph g = f.make(k % 3 == 0 ? Family::PointSymmetric : Family::Arbitrary, 12);
    const std::string once = serialize_graph(g);
    const std::string twice = serialize_graph(parse_graph_string(once));
    CHECK(once == twice);
  }
  const std::string w = serialize_graph(whirlpool_fixture(1.0));
  CHECK(serialize_graph(parse_graph_string(w)) == w);
  const std::string lat = serialize_graph(build_obstructed_lattice(8, ObstructionSpec::square_quadrant(), InteractionKind::Bonding));
  CHECK(serialize_graph(parse_graph_string(lat)) == lat);
  CHECK(lat.find("# interaction=bonding") != std::string::npos);
}

TEST_CASE("graph file canonical ordering and parse errors") {
  const std::string text =
      "d=1\n"
      "node 0 0.5\n"
      "node 1 0\n"
      "edge 1 0.5 2\n"
      "edge 0 0.5 1\n"
      "edge 0 -0.5 1\n"
      "edge 1 -0.5 2\n";
  const std::string canon = serialize_graph(parse_graph_string(text));
  CHECK(canon == "d=1\nnode 0 0\nnode 1 0.5\nedge 0 -0.5 2\nedge 0 0.5 2\nedge 1 -0.5 1\nedge 1 0.5 1\n");

  CHECK(error_of([] { parse_graph_string("node 0 0\n"); }) == Errc::ParseError);
  CHECK(error_of([] { parse_graph_string("d=1\nnode 0 zero\n"); }) == Errc::ParseError);
  CHECK(error_of([] { parse_graph_string("d=1\nnode 0 0\nedge 0 1\n"); }) == Errc::ParseError);
  CHECK(error_of([] { parse_graph_string("d=1\nnode 0 0\nvertex 0 0\n"); }) == Errc::ParseError);
  CHECK(error_of([] { parse_graph_string("d=1\nnode 0 0\nedge 0 1 -1\n"); }) == Errc::NonPositiveRate);
  CHECK(error_of([] { parse_graph_string("d=1\nnode 0 0\nnode 2 0.5\n"); }) == Errc::ParseError);
}
