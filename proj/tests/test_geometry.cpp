#include <doctest.h>

#include "homog/error.hpp"
#include "homog/geometry.hpp"
#include "homog/homogenize.hpp"
#include "support.hpp"

#include <functional>
#include <map>
#include <set>

using namespace homog;

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

// Integer-arithmetic enumeration of the closed-box lattice: the point i/n is
// obstructed on an axis when 4i ≥ 3n or i = 0 (the image of the face x = 1).
struct Brute {
  int n;
  bool axis_blocked(int i) const { return 4 * i >= 3 * n || i == 0; }
  bool blocked(int i, int j) const { return axis_blocked(i) && axis_blocked(j); }
  // ∞-distance to the periodic box, in units of h, scaled by 4 to stay integer.
  int dist4(int i, int j) const {
    int best = 1 << 30;
    for (int zx = -1; zx <= 1; ++zx) {
      for (int zy = -1; zy <= 1; ++zy) {
        const int x = 4 * (i + zx * n), y = 4 * (j + zy * n);
        const int dx = std::max({3 * n - x, 0, x - 4 * n});
        const int dy = std::max({3 * n - y, 0, y - 4 * n});
        best = std::min(best, std::max(dx, dy));
      }
    }
    return best;
  }
  bool border(int i, int j) const { return !blocked(i, j) && dist4(i, j) <= 4; }
  int nodes() const {
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c += !blocked(i, j);
    return c;
  }
  int edges(bool diagonal) const {
    std::vector<std::pair<int, int>> steps = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    if (diagonal) {
      steps.push_back({1, 1});
      steps.push_back({-1, -1});
    }
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!blocked(i, j))
          for (auto [a, b] : steps) c += !blocked(((i + a) % n + n) % n, ((j + b) % n + n) % n);
    return c;
  }
};

std::pair<int, int> grid_of(const QuotientGraph& g, int y, int n) {
  return {static_cast<int>(std::lround(g.node(y).coords[0] * n)) % n, static_cast<int>(std::lround(g.node(y).coords[1] * n)) % n};
}

}  // namespace

TEST_CASE("node and edge counts against brute force") {
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const Brute b{n};
    const QuotientGraph g = build_obstructed_lattice(n);
    CHECK(g.num_nodes() == b.nodes());
    CHECK(g.num_edges() == b.edges(false));
    const QuotientGraph d = build_diagonal_lattice(n);
    CHECK(d.num_nodes() == b.nodes());
    CHECK(d.num_edges() == b.edges(true));
  }
  CHECK(build_obstructed_lattice(2).num_nodes() == 3);
  CHECK(build_obstructed_lattice(4).num_nodes() == 12);
  CHECK(build_obstructed_lattice(8).num_nodes() == 55);
}

TEST_CASE("h = 1/2 layout") {
  const QuotientGraph g = build_obstructed_lattice(2);
  std::set<std::pair<int, int>> pts;
  for (int y = 0; y < 3; ++y) pts.insert(grid_of(g, y, 2));
  CHECK(pts == std::set<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}});
  for (const auto& e : g.edges()) CHECK(e.rate == 4.0);
}

TEST_CASE("neutral rates and border set") {
  for (int n : {4, 8, 16}) {
    const Brute b{n};
    const QuotientGraph g = build_obstructed_lattice(n);
    for (const auto& e : g.edges()) CHECK(e.rate == static_cast<double>(n) * n);
    const auto mask = border_nodes(g, n, ObstructionSpec::square_quadrant());
    for (int y = 0; y < g.num_nodes(); ++y) {
      const auto [i, j] = grid_of(g, y, n);
      CHECK(static_cast<bool>(mask[static_cast<std::size_t>(y)]) == b.border(i, j));
    }
  }
}

TEST_CASE("interaction rate tables at h = 1/8") {
  const int n = 8;
  const auto spec = ObstructionSpec::square_quadrant();
  const QuotientGraph neutral = build_obstructed_lattice(n);
  const auto mask = border_nodes(neutral, n, spec);
  auto in_b = [&](int y) { return mask[static_cast<std::size_t>(y)] != 0; };

  const QuotientGraph bonding = build_obstructed_lattice(n, spec, InteractionKind::Bonding);
  for (const auto& e : bonding.edges()) CHECK(e.rate == (in_b(e.origin) ? 32.0 : 64.0));

  const QuotientGraph rep = build_obstructed_lattice(n, spec, InteractionKind::Repulsion);
  const QuotientGraph att = build_obstructed_lattice(n, spec, InteractionKind::Attraction);
  for (int k = 0; k < rep.num_edges(); ++k) {
    const auto& e = rep.edge(k);
    const bool from = in_b(e.origin), to = in_b(e.terminal);
    const double leave = from && !to ? 128.0 : (!from && to ? 32.0 : 64.0);
    const double attract = from && !to ? 32.0 : (!from && to ? 128.0 : 64.0);
    CHECK(e.rate == leave);
    CHECK(att.edge(k).rate == attract);
  }
}

TEST_CASE("interactions change rates only") {
  const auto spec = ObstructionSpec::square_quadrant();
  for (int n : {4, 8, 16}) {
    const QuotientGraph base = build_obstructed_lattice(n);
    for (auto kind : {InteractionKind::Bonding, InteractionKind::Repulsion, InteractionKind::Attraction}) {
      const QuotientGraph g = build_obstructed_lattice(n, spec, kind);
      REQUIRE(g.num_nodes() == base.num_nodes());
      REQUIRE(g.num_edges() == base.num_edges());
      for (int y = 0; y < g.num_nodes(); ++y) CHECK((g.node(y).coords - base.node(y).coords).norm() == 0.0);
      for (int e = 0; e < g.num_edges(); ++e) {
        CHECK(g.edge(e).origin == base.edge(e).origin);
        CHECK((g.edge(e).jump - base.edge(e).jump).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("diagonal lattice") {
  const int n = 8;
  const auto spec = ObstructionSpec::square_quadrant();
  const QuotientGraph plain = build_obstructed_lattice(n);
  const QuotientGraph diag = build_diagonal_lattice(n);
  std::set<std::pair<int, std::vector<long>>> plain_edges, diag_edges;
  auto key = [&](const QuotientEdge& e) {
    return std::pair<int, std::vector<long>>{
        e.origin, {std::lround(e.jump[0] * n), std::lround(e.jump[1] * n)}};
  };
  for (const auto& e : plain.edges()) plain_edges.insert(key(e));
  for (const auto& e : diag.edges()) diag_edges.insert(key(e));
  CHECK(std::includes(diag_edges.begin(), diag_edges.end(), plain_edges.begin(), plain_edges.end()));
  CHECK(diag_edges.size() > plain_edges.size());

  const auto mask = border_nodes(diag, n, spec);
  bool saw_double = false, saw_single = false;
  for (const auto& e : diag.edges()) {
    const bool both = mask[static_cast<std::size_t>(e.origin)] && mask[static_cast<std::size_t>(e.terminal)];
    CHECK(e.rate == (both ? 64.0 : 32.0));
    saw_double = saw_double || both;
    saw_single = saw_single || !both;
    // Only ±(h,h) diagonals unless asked.
    if (e.jump[0] != 0 && e.jump[1] != 0) CHECK(e.jump[0] == e.jump[1]);
  }
  CHECK(saw_double);
  CHECK(saw_single);

  const QuotientGraph anti = build_diagonal_lattice(8, spec, true);
  bool saw_anti = false;
  for (const auto& e : anti.edges()) saw_anti = saw_anti || e.jump[0] == -e.jump[1];
  CHECK(saw_anti);
  CHECK(anti.num_edges() > build_diagonal_lattice(8).num_edges());
}

TEST_CASE("whirlpool fixture") {
  const QuotientGraph w = whirlpool_fixture(1.0);
  const double t = 1.0 / 3.0;
  const double expected[8][2] = {{0, 0}, {t, 0}, {2 * t, 0}, {0, t}, {2 * t, t}, {0, 2 * t}, {t, 2 * t}, {2 * t, 2 * t}};
  for (int y = 0; y < 8; ++y) {
    CHECK(w.node(y).coords[0] == doctest::Approx(expected[y][0]));
    CHECK(w.node(y).coords[1] == doctest::Approx(expected[y][1]));
    CHECK(w.out_edges(y).size() == 1);
    CHECK(w.in_edges(y).size() == 1);
  }
  for (const auto& e : w.edges()) {
    CHECK(e.rate == 1.0);
    CHECK_FALSE(e.reversal.has_value());
    CHECK(e.jump.cwiseAbs().maxCoeff() == doctest::Approx(t));
  }
  CHECK(analyze(w).u_bar.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(error_of([] { whirlpool_fixture(0.0); }) == Errc::NonPositiveRate);
}

TEST_CASE("every resolution builds a valid graph") {
  for (int n = 2; n <= 512; n *= 2) {
    CHECK_NOTHROW(build_obstructed_lattice(n));
    if (n <= 128) CHECK_NOTHROW(build_diagonal_lattice(n));
  }
}

TEST_CASE("neutral lattices carry axis reflection symmetry") {
  for (int n : {2, 4, 8, 16, 32}) {
    const QuotientGraph g = build_obstructed_lattice(n);
    const auto phis = find_axis_reflections(g);
    const auto s = check_symmetry_null_drift(g, phis);
    CHECK(s.overall);
    if (n < 4) continue;
    // The reflection fixes the obstruction's axis x = 7/8.
    const auto p = reflection_permutation(g, 0, 7.0 / 8.0);
    REQUIRE(p);
    CHECK(check_symmetry_null_drift(g, {*p, phis[1]}).axis_pass[0]);
  }
}

TEST_CASE("resolution parsing and errors") {
  CHECK(parse_resolution("1/8") == 8);
  CHECK(parse_resolution("0.125") == 8);
  CHECK(parse_resolution("1") == 1);
  CHECK(resolution_from_h(1.0 / 512) == 512);
  CHECK(error_of([] { parse_resolution("0.3"); }) == Errc::InvalidResolution);
  CHECK(error_of([] { parse_resolution("eighth"); }) == Errc::InvalidResolution);
  CHECK(error_of([] { parse_resolution("1/0"); }) == Errc::InvalidResolution);
  CHECK(error_of([] { resolution_from_h(-0.5); }) == Errc::InvalidResolution);
  CHECK(error_of([] { build_obstructed_lattice(0); }) == Errc::InvalidResolution);
  CHECK(error_of([] { build_obstructed_lattice(1); }) == Errc::EmptyGraph);
  CHECK(build_obstructed_lattice(1, ObstructionSpec::none()).num_nodes() == 1);
}

TEST_CASE("alternative conventions stay selectable") {
  ObstructionSpec half = ObstructionSpec::square_quadrant();
  half.convention = BoundaryConvention::HalfOpen;
  // Half-open [3/4,1): at h = 1/4 only (3/4,3/4) is obstructed.
  CHECK(build_obstructed_lattice(4, half).num_nodes() == 15);
  ObstructionSpec strict = ObstructionSpec::square_quadrant();
  strict.border = BorderRule::Strict;
  const QuotientGraph g = build_obstructed_lattice(8, strict);
  const auto mask = border_nodes(g, 8, strict);
  int count = 0;
  for (char c : mask) count += c;
  CHECK(count == 0);  // closed boxes leave every free node at distance ≥ h
  const std::string text = annotation_value(g, "border").value_or("");
  CHECK(text == "strict");
  CHECK(annotation_value(build_obstructed_lattice(8, half), "boundary").value_or("") == "half-open");
}
