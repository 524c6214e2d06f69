#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace homog {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coordinates closer than this (per axis, modulo 1) name the same node.
inline constexpr double kSnapTolerance = 1e-9;

struct QuotientNode {
  int index = 0;
  Vec coords;  // each entry in [0,1)
};

struct QuotientEdge {
  int origin = 0;
  int terminal = 0;  // node at coords(origin) + jump, modulo 1
  Vec jump;          // lifted displacement, in unit-cell lengths
  double rate = 0.0;
  std::optional<int> reversal;  // edge leaving `terminal` with jump -jump
};

struct RawEdge {
  int origin = 0;
  Vec jump;
  double rate = 0.0;
};

// Snapped, periodic lookup from coordinates to node index.
class NodeIndex {
 public:
  explicit NodeIndex(int dimension = 0) : dim_(dimension) {}

  // Returns the index already registered within kSnapTolerance, if any.
  std::optional<int> find(const Vec& coords) const;
  void insert(const Vec& coords, int index);

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept;
  };
  std::vector<std::int64_t> key_of(const Vec& coords) const;

  int dim_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::pair<Vec, int>>, KeyHash> cells_;
};

// Maps coordinates into [0,1); values within the snap tolerance of 1 wrap to 0.
Vec wrap_unit_cell(const Vec& coords);

// Largest per-axis distance on the unit torus.
double torus_distance(const Vec& a, const Vec& b);

// The finite quotient (S̄, Ē, λ) of a periodic graph. Immutable once built.
class QuotientGraph {
 public:
  int dimension() const { return dim_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<QuotientNode>& nodes() const { return nodes_; }
  const QuotientNode& node(int y) const { return nodes_[static_cast<std::size_t>(y)]; }
  const std::vector<QuotientEdge>& edges() const { return edges_; }
  const QuotientEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  // E_y: edges leaving y.  E'_y: edges arriving at y.
  std::span<const int> out_edges(int y) const { return out_[static_cast<std::size_t>(y)]; }
  std::span<const int> in_edges(int y) const { return in_[static_cast<std::size_t>(y)]; }

  std::optional<int> find_node(const Vec& coords) const { return index_.find(wrap_unit_cell(coords)); }

  // Free-form `key=value` lines carried through the graph file as comments.
  const std::vector<std::string>& annotations() const { return annotations_; }

  friend QuotientGraph build_quotient_graph(int dimension, const std::vector<Vec>& node_coords,
                                            const std::vector<RawEdge>& raw_edges,
                                            std::vector<std::string> annotations);

 private:
  QuotientGraph() = default;

  int dim_ = 0;
  std::vector<QuotientNode> nodes_;
  std::vector<QuotientEdge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::string> annotations_;
  NodeIndex index_;
};

// Validates and assembles a quotient graph. Throws Error with DuplicateNode,
// DanglingEdge, DuplicateEdge, SelfEdge, NonPositiveRate, EmptyGraph or
// NotStronglyConnected.
QuotientGraph build_quotient_graph(int dimension, const std::vector<Vec>& node_coords,
                                   const std::vector<RawEdge>& raw_edges,
                                   std::vector<std::string> annotations = {});

// κ: Ē → E_Π together with the aggregated rates λ̄ of the projected chain.
struct ProjectedEdgeMap {
  std::vector<std::pair<int, int>> pairs;  // sorted (origin, terminal) node pairs
  std::vector<int> kappa;                  // edge index -> position in `pairs`
  std::vector<double> aggregated_rates;    // λ̄ per pair
  bool bijective = false;
  bool commutes_with_reversals = false;
};

ProjectedEdgeMap project_edges(const QuotientGraph& g);

// Σ ν_e along a chained edge path. Throws BrokenPath when consecutive edges
// do not connect.
Vec lift_displacement(const QuotientGraph& g, std::span<const int> edge_path);

// Value of an annotation `key=value`, if present.
std::optional<std::string> annotation_value(const QuotientGraph& g, const std::string& key);

}  // namespace homog
