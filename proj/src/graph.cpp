#include "homog/graph.hpp"

#include "homog/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace homog {

namespace {

constexpr std::int64_t kGridCells = 1'000'000'000;  // 1 / kSnapTolerance

std::string format_coords(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

std::vector<char> reachable(const std::vector<std::vector<int>>& adjacency,
                            const std::vector<QuotientEdge>& edges, bool forward) {
  std::vector<char> seen(adjacency.size(), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int y = queue.front();
    queue.pop_front();
    for (int e : adjacency[static_cast<std::size_t>(y)]) {
      const int next = forward ? edges[static_cast<std::size_t>(e)].terminal
                               : edges[static_cast<std::size_t>(e)].origin;
      if (!seen[static_cast<std::size_t>(next)]) {
        seen[static_cast<std::size_t>(next)] = 1;
        queue.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

Vec wrap_unit_cell(const Vec& coords) {
  Vec out(coords.size());
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    double c = coords[i] - std::floor(coords[i]);
    if (c >= 1.0 - 0.5 * kSnapTolerance) c = 0.0;
    out[i] = c;
  }
  return out;
}

double torus_distance(const Vec& a, const Vec& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double delta = std::fabs(a[i] - b[i]);
    delta -= std::floor(delta);
    worst = std::max(worst, std::min(delta, 1.0 - delta));
  }
  return worst;
}

std::size_t NodeIndex::KeyHash::operator()(const std::vector<std::int64_t>& key) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (std::int64_t k : key) {
    h ^= std::hash<std::int64_t>{}(k) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::vector<std::int64_t> NodeIndex::key_of(const Vec& coords) const {
  std::vector<std::int64_t> key(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    const auto cell = static_cast<std::int64_t>(std::llround(coords[i] * static_cast<double>(kGridCells)));
    key[static_cast<std::size_t>(i)] = ((cell % kGridCells) + kGridCells) % kGridCells;
  }
  return key;
}

std::optional<int> NodeIndex::find(const Vec& coords) const {
  const auto base = key_of(coords);
  std::vector<std::int64_t> probe(base.size());
  // Visit the 3^d neighbouring grid cells so that values straddling a cell
  // boundary still match.
  int combos = 1;
  for (int i = 0; i < dim_; ++i) combos *= 3;
  for (int c = 0; c < combos; ++c) {
    int rest = c;
    for (int i = 0; i < dim_; ++i) {
      const std::int64_t offset = rest % 3 - 1;
      rest /= 3;
      probe[static_cast<std::size_t>(i)] =
          ((base[static_cast<std::size_t>(i)] + offset) % kGridCells + kGridCells) % kGridCells;
    }
    auto it = cells_.find(probe);
    if (it == cells_.end()) continue;
    for (const auto& [stored, index] : it->second) {
      if (torus_distance(stored, coords) <= kSnapTolerance) return index;
    }
  }
  return std::nullopt;
}

void NodeIndex::insert(const Vec& coords, int index) { cells_[key_of(coords)].emplace_back(coords, index); }

QuotientGraph build_quotient_graph(int dimension, const std::vector<Vec>& node_coords,
                                   const std::vector<RawEdge>& raw_edges,
                                   std::vector<std::string> annotations) {
  if (dimension < 1) throw Error(Errc::InvalidArgument, "dimension must be positive");
  if (node_coords.empty()) throw Error(Errc::EmptyGraph, "graph has no nodes");

  QuotientGraph g;
  g.dim_ = dimension;
  g.index_ = NodeIndex(dimension);
  g.annotations_ = std::move(annotations);
  g.nodes_.reserve(node_coords.size());

  for (std::size_t i = 0; i < node_coords.size(); ++i) {
    const Vec& raw = node_coords[i];
    if (raw.size() != dimension) {
      throw Error(Errc::InvalidArgument, "node " + std::to_string(i) + " has wrong dimension");
    }
    if (!raw.allFinite()) throw Error(Errc::InvalidArgument, "node " + std::to_string(i) + " is not finite");
    Vec coords = wrap_unit_cell(raw);
    if (auto other = g.index_.find(coords)) {
      throw Error(Errc::DuplicateNode, "nodes " + std::to_string(*other) + " and " + std::to_string(i) +
                                           " coincide at " + format_coords(coords));
    }
    g.index_.insert(coords, static_cast<int>(i));
    g.nodes_.push_back(QuotientNode{static_cast<int>(i), std::move(coords)});
  }

  const int n = g.num_nodes();
  g.out_.assign(static_cast<std::size_t>(n), {});
  g.in_.assign(static_cast<std::size_t>(n), {});

  // (origin, snapped jump) -> edge, used for duplicate and reversal lookup.
  std::map<std::pair<int, std::vector<std::int64_t>>, int> by_jump;
  auto jump_key = [](const Vec& jump) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(jump.size()));
    for (Eigen::Index i = 0; i < jump.size(); ++i) {
      key[static_cast<std::size_t>(i)] = std::llround(jump[i] * static_cast<double>(kGridCells));
    }
    return key;
  };

  g.edges_.reserve(raw_edges.size());
  for (std::size_t k = 0; k < raw_edges.size(); ++k) {
    const RawEdge& raw = raw_edges[k];
    const std::string label = "edge " + std::to_string(k);
    if (raw.origin < 0 || raw.origin >= n) throw Error(Errc::InvalidArgument, label + " has unknown origin");
    if (raw.jump.size() != dimension) throw Error(Errc::InvalidArgument, label + " has wrong dimension");
    if (!raw.jump.allFinite()) throw Error(Errc::InvalidArgument, label + " jump is not finite");
    if (!(raw.rate > 0.0) || !std::isfinite(raw.rate)) {
      throw Error(Errc::NonPositiveRate, label + " has rate " + std::to_string(raw.rate));
    }
    if (raw.jump.cwiseAbs().maxCoeff() <= kSnapTolerance) {
      throw Error(Errc::SelfEdge, label + " has zero jump at node " + std::to_string(raw.origin));
    }
    const Vec target = g.nodes_[static_cast<std::size_t>(raw.origin)].coords + raw.jump;
    auto terminal = g.find_node(target);
    if (!terminal) {
      throw Error(Errc::DanglingEdge, label + " from node " + std::to_string(raw.origin) + " lands on " +
                                          format_coords(wrap_unit_cell(target)) + ", which is not a node");
    }
    auto [it, inserted] = by_jump.emplace(std::make_pair(raw.origin, jump_key(raw.jump)), static_cast<int>(k));
    if (!inserted) {
      throw Error(Errc::DuplicateEdge, label + " repeats edge " + std::to_string(it->second));
    }
    g.edges_.push_back(QuotientEdge{raw.origin, *terminal, raw.jump, raw.rate, std::nullopt});
    g.out_[static_cast<std::size_t>(raw.origin)].push_back(static_cast<int>(k));
    g.in_[static_cast<std::size_t>(*terminal)].push_back(static_cast<int>(k));
  }

  for (auto& e : g.edges_) {
    auto it = by_jump.find(std::make_pair(e.terminal, jump_key(-e.jump)));
    if (it != by_jump.end()) e.reversal = it->second;
  }

  const auto forward = reachable(g.out_, g.edges_, true);
  const auto backward = reachable(g.in_, g.edges_, false);
  for (int y = 0; y < n; ++y) {
    if (!forward[static_cast<std::size_t>(y)]) {
      throw Error(Errc::NotStronglyConnected, "node " + std::to_string(y) + " is unreachable from node 0");
    }
    if (!backward[static_cast<std::size_t>(y)]) {
      throw Error(Errc::NotStronglyConnected, "node 0 is unreachable from node " + std::to_string(y));
    }
  }
  return g;
}

ProjectedEdgeMap project_edges(const QuotientGraph& g) {
  ProjectedEdgeMap map;
  std::map<std::pair<int, int>, std::vector<int>> members;
  for (int e = 0; e < g.num_edges(); ++e) {
    members[{g.edge(e).origin, g.edge(e).terminal}].push_back(e);
  }
  map.kappa.assign(static_cast<std::size_t>(g.num_edges()), -1);
  for (const auto& [pair, edge_ids] : members) {
    const int slot = static_cast<int>(map.pairs.size());
    map.pairs.push_back(pair);
    double total = 0.0;
    for (int e : edge_ids) {
      map.kappa[static_cast<std::size_t>(e)] = slot;
      total += g.edge(e).rate;
    }
    map.aggregated_rates.push_back(total);
  }
  map.bijective = map.pairs.size() == static_cast<std::size_t>(g.num_edges());

  map.commutes_with_reversals = true;
  for (const auto& e : g.edges()) {
    if (members.count({e.terminal, e.origin}) && !e.reversal) {
      map.commutes_with_reversals = false;
      break;
    }
  }
  return map;
}

Vec lift_displacement(const QuotientGraph& g, std::span<const int> edge_path) {
  Vec total = Vec::Zero(g.dimension());
  for (std::size_t i = 0; i < edge_path.size(); ++i) {
    const int e = edge_path[i];
    if (e < 0 || e >= g.num_edges()) throw Error(Errc::BrokenPath, "unknown edge " + std::to_string(e));
    if (i > 0 && g.edge(edge_path[i - 1]).terminal != g.edge(e).origin) {
      throw Error(Errc::BrokenPath, "edge " + std::to_string(edge_path[i - 1]) + " does not feed edge " +
                                        std::to_string(e));
    }
    total += g.edge(e).jump;
  }
  return total;
}

std::optional<std::string> annotation_value(const QuotientGraph& g, const std::string& key) {
  const std::string prefix = key + "=";
  for (const auto& line : g.annotations()) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return std::nullopt;
}

}  // namespace homog
