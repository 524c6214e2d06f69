#include "homog/geometry.hpp"

#include "homog/error.hpp"
#include "homog/homogenize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace homog {

namespace {

constexpr double kGeomTol = 1e-12;

// Distance from c to the periodic interval [lo,hi] + ℤ.
double interval_distance(double c, double lo, double hi) {
  double best = std::numeric_limits<double>::infinity();
  const double base = std::floor(c);
  for (int z = -1; z <= 1; ++z) {
    const double v = c - base + z;
    best = std::min(best, std::max({lo - v, 0.0, v - hi}));
  }
  return best;
}

bool interval_contains(double c, double lo, double hi, BoundaryConvention conv) {
  const double base = std::floor(c);
  for (int z = -1; z <= 1; ++z) {
    const double v = c - base + z;
    if (conv == BoundaryConvention::Closed) {
      if (v >= lo - kGeomTol && v <= hi + kGeomTol) return true;
    } else if (v >= lo - kGeomTol && v < hi - kGeomTol) {
      return true;
    }
  }
  return false;
}

std::string h_label(int n) { return n == 1 ? "1" : "1/" + std::to_string(n); }

struct Lattice {
  int n = 0;
  int d = 0;
  std::vector<std::vector<int>> points;  // integer multi-indices
  std::vector<Vec> coords;
  std::vector<int> slot;  // flattened multi-index -> node or -1
  std::vector<char> border;

  int flat(const std::vector<int>& p) const {
    int k = 0;
    for (int i = d - 1; i >= 0; --i) k = k * n + (((p[static_cast<std::size_t>(i)] % n) + n) % n);
    return k;
  }
};

Lattice enumerate(int n, const ObstructionSpec& spec) {
  if (n < 1) throw Error(Errc::InvalidResolution, "1/h must be a positive integer");
  spec.validate();
  Lattice lat;
  lat.n = n;
  lat.d = spec.dimension;
  const double h = 1.0 / n;
  std::size_t total = 1;
  for (int i = 0; i < lat.d; ++i) total *= static_cast<std::size_t>(n);
  lat.slot.assign(total, -1);

  std::vector<int> p(static_cast<std::size_t>(lat.d), 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (int i = 0; i < lat.d; ++i) {
      p[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    Vec x(lat.d);
    for (int i = 0; i < lat.d; ++i) x[i] = p[static_cast<std::size_t>(i)] * h;
    if (spec.obstructs(x)) continue;
    lat.slot[k] = static_cast<int>(lat.points.size());
    lat.points.push_back(p);
    const double dist = spec.distance(x);
    const bool near = spec.border == BorderRule::Adjacent ? dist <= h + kGeomTol : dist < h - kGeomTol;
    lat.border.push_back(near ? 1 : 0);
    lat.coords.push_back(std::move(x));
  }
  if (lat.points.empty()) throw Error(Errc::EmptyGraph, "every lattice point at h=" + h_label(n) + " is obstructed");
  return lat;
}

std::vector<std::string> annotations_for(const std::string& lattice, int n, const ObstructionSpec& spec,
                                         const std::string& interaction) {
  std::vector<std::string> a;
  a.push_back(std::string("geometry=") + (spec.boxes.empty() ? "free" : "square-quadrant"));
  a.push_back("lattice=" + lattice);
  a.push_back("h=" + h_label(n));
  a.push_back("interaction=" + interaction);
  a.push_back("boundary=" + std::string(convention_name(spec.convention)));
  a.push_back("border=" + std::string(border_name(spec.border)));
  return a;
}

double interaction_rate(InteractionKind kind, bool from_border, bool to_border, double base) {
  switch (kind) {
    case InteractionKind::Neutral: return base;
    case InteractionKind::Bonding: return from_border ? base / 2 : base;
    case InteractionKind::Repulsion:
      if (from_border && !to_border) return 2 * base;
      if (!from_border && to_border) return base / 2;
      return base;
    case InteractionKind::Attraction:
      if (!from_border && to_border) return 2 * base;
      if (from_border && !to_border) return base / 2;
      return base;
  }
  return base;
}

QuotientGraph assemble(const Lattice& lat, const std::vector<std::vector<int>>& steps,
                       const std::function<double(bool, bool)>& rate, std::vector<std::string> annotations) {
  const double h = 1.0 / lat.n;
  std::vector<RawEdge> edges;
  for (std::size_t k = 0; k < lat.points.size(); ++k) {
    for (const auto& s : steps) {
      std::vector<int> q = lat.points[k];
      for (int i = 0; i < lat.d; ++i) q[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i)];
      const int m = lat.slot[static_cast<std::size_t>(lat.flat(q))];
      if (m < 0) continue;
      Vec jump(lat.d);
      for (int i = 0; i < lat.d; ++i) jump[i] = s[static_cast<std::size_t>(i)] * h;
      edges.push_back(RawEdge{static_cast<int>(k), std::move(jump),
                              rate(lat.border[k] != 0, lat.border[static_cast<std::size_t>(m)] != 0)});
    }
  }
  return build_quotient_graph(lat.d, lat.coords, edges, std::move(annotations));
}

std::vector<std::vector<int>> axis_steps(int d) {
  std::vector<std::vector<int>> steps;
  for (int i = 0; i < d; ++i) {
    for (int sign : {1, -1}) {
      std::vector<int> s(static_cast<std::size_t>(d), 0);
      s[static_cast<std::size_t>(i)] = sign;
      steps.push_back(s);
    }
  }
  return steps;
}

}  // namespace

ObstructionSpec ObstructionSpec::square_quadrant() {
  ObstructionSpec s;
  s.dimension = 2;
  s.boxes.push_back(Box{Vec::Constant(2, 0.75), Vec::Constant(2, 1.0)});
  return s;
}

ObstructionSpec ObstructionSpec::none(int dimension) {
  ObstructionSpec s;
  s.dimension = dimension;
  return s;
}

void ObstructionSpec::validate() const {
  if (dimension < 1) throw Error(Errc::InvalidArgument, "obstruction dimension must be positive");
  for (const auto& b : boxes) {
    if (b.lo.size() != dimension || b.hi.size() != dimension) throw Error(Errc::InvalidArgument, "box has wrong dimension");
    for (int i = 0; i < dimension; ++i) {
      if (!(b.lo[i] >= 0.0 && b.hi[i] <= 1.0 && b.lo[i] < b.hi[i])) {
        throw Error(Errc::InvalidArgument, "box must be non-degenerate and inside the unit cell");
      }
    }
  }
}

bool ObstructionSpec::obstructs(const Vec& x) const {
  for (const auto& b : boxes) {
    bool inside = true;
    for (int i = 0; inside && i < dimension; ++i) inside = interval_contains(x[i], b.lo[i], b.hi[i], convention);
    if (inside) return true;
  }
  return false;
}

double ObstructionSpec::distance(const Vec& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) {
    double worst = 0.0;
    for (int i = 0; i < dimension; ++i) worst = std::max(worst, interval_distance(x[i], b.lo[i], b.hi[i]));
    best = std::min(best, worst);
  }
  return best;
}

std::string_view interaction_name(InteractionKind k) {
  switch (k) {
    case InteractionKind::Neutral: return "neutral";
    case InteractionKind::Bonding: return "bonding";
    case InteractionKind::Repulsion: return "repulsion";
    case InteractionKind::Attraction: return "attraction";
  }
  return "?";
}

std::optional<InteractionKind> parse_interaction(std::string_view s) {
  for (auto k : {InteractionKind::Neutral, InteractionKind::Bonding, InteractionKind::Repulsion, InteractionKind::Attraction}) {
    if (interaction_name(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view convention_name(BoundaryConvention c) { return c == BoundaryConvention::Closed ? "closed" : "half-open"; }
std::string_view border_name(BorderRule b) { return b == BorderRule::Adjacent ? "adjacent" : "strict"; }

int resolution_from_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::InvalidResolution, "h must be positive");
  const double inv = 1.0 / h;
  const long n = std::lround(inv);
  if (n < 1 || std::fabs(inv - static_cast<double>(n)) > 1e-9 * inv) {
    throw Error(Errc::InvalidResolution, "1/h must be an integer so the lattice is unit periodic");
  }
  return static_cast<int>(n);
}

int parse_resolution(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    double num = 0.0, den = 0.0;
    auto r1 = std::from_chars(text.data(), text.data() + slash, num);
    auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), den);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r2.ptr != text.data() + text.size() || den == 0.0) {
      throw Error(Errc::InvalidResolution, "cannot read h from '" + text + "'");
    }
    return resolution_from_h(num / den);
  }
  double h = 0.0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), h);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw Error(Errc::InvalidResolution, "cannot read h from '" + text + "'");
  }
  return resolution_from_h(h);
}

QuotientGraph build_obstructed_lattice(int n, const ObstructionSpec& obstruction, InteractionKind interaction) {
  const Lattice lat = enumerate(n, obstruction);
  const double base = static_cast<double>(n) * n;
  return assemble(
      lat, axis_steps(lat.d),
      [&](bool from, bool to) { return interaction_rate(interaction, from, to, base); },
      annotations_for("axis", n, obstruction, std::string(interaction_name(interaction))));
}

std::vector<char> border_nodes(const QuotientGraph& g, int n, const ObstructionSpec& obstruction) {
  const double h = 1.0 / n;
  std::vector<char> mask;
  mask.reserve(static_cast<std::size_t>(g.num_nodes()));
  for (const auto& node : g.nodes()) {
    const double dist = obstruction.distance(node.coords);
    mask.push_back(obstruction.border == BorderRule::Adjacent ? dist <= h + kGeomTol : dist < h - kGeomTol);
  }
  return mask;
}

QuotientGraph build_diagonal_lattice(int n, const ObstructionSpec& obstruction, bool anti_diagonal) {
  if (obstruction.dimension != 2) throw Error(Errc::InvalidArgument, "the diagonal lattice is two-dimensional");
  const Lattice lat = enumerate(n, obstruction);
  auto steps = axis_steps(2);
  steps.push_back({1, 1});
  steps.push_back({-1, -1});
  if (anti_diagonal) {
    steps.push_back({1, -1});
    steps.push_back({-1, 1});
  }
  const double base = static_cast<double>(n) * n;
  return assemble(
      lat, steps, [&](bool from, bool to) { return from && to ? base : base / 2; },
      annotations_for(anti_diagonal ? "diagonal+anti" : "diagonal", n, obstruction, "diagonal"));
}

QuotientGraph whirlpool_fixture(double lambda_bar) {
  if (!(lambda_bar > 0.0)) throw Error(Errc::NonPositiveRate, "whirlpool rate must be positive");
  const double t = 1.0 / 3.0;
  auto v = [](double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
  };
  const std::vector<Vec> nodes = {v(0, 0), v(t, 0), v(2 * t, 0), v(0, t), v(2 * t, t), v(0, 2 * t), v(t, 2 * t), v(2 * t, 2 * t)};
  // One cycle y1→y7→y6→y5→y8→y2→y3→y4→y1, indices are zero-based.
  const std::vector<RawEdge> edges = {
      {0, v(t, -t), lambda_bar},  {6, v(-t, 0), lambda_bar}, {5, v(-t, -t), lambda_bar}, {4, v(0, t), lambda_bar},
      {7, v(-t, t), lambda_bar},  {1, v(t, 0), lambda_bar},  {2, v(t, t), lambda_bar},   {3, v(0, -t), lambda_bar},
  };
  return build_quotient_graph(2, nodes, edges, {"geometry=whirlpool", "lambda_bar=" + std::to_string(lambda_bar)});
}

std::optional<std::vector<int>> reflection_permutation(const QuotientGraph& g, int axis, double center) {
  std::vector<int> perm(static_cast<std::size_t>(g.num_nodes()));
  for (int y = 0; y < g.num_nodes(); ++y) {
    Vec image = g.node(y).coords;
    image[axis] = 2 * center - image[axis];
    auto hit = g.find_node(image);
    if (!hit) return std::nullopt;
    perm[static_cast<std::size_t>(y)] = *hit;
  }
  return perm;
}

std::vector<std::vector<int>> find_axis_reflections(const QuotientGraph& g) {
  const int d = g.dimension();
  const int n = g.num_nodes();
  std::vector<int> identity(static_cast<std::size_t>(n));
  for (int y = 0; y < n; ++y) identity[static_cast<std::size_t>(y)] = y;
  std::vector<std::vector<int>> out(static_cast<std::size_t>(d), identity);

  for (int axis = 0; axis < d; ++axis) {
    std::set<long long> tried;
    std::vector<double> candidates;
    for (int y = 0; y < n; ++y) candidates.push_back(0.5 * (g.node(0).coords[axis] + g.node(y).coords[axis]));
    for (int y = 0; y < n; ++y) candidates.push_back(0.5 * (g.node(0).coords[axis] + g.node(y).coords[axis] + 1.0));
    for (double c : candidates) {
      if (!tried.insert(std::llround(c * 1e9)).second) continue;
      auto perm = reflection_permutation(g, axis, c);
      if (!perm) continue;
      auto phis = out;
      phis[static_cast<std::size_t>(axis)] = *perm;
      if (check_symmetry_null_drift(g, phis).axis_pass[static_cast<std::size_t>(axis)]) {
        out[static_cast<std::size_t>(axis)] = std::move(*perm);
        break;
      }
    }
  }
  return out;
}

}  // namespace homog
