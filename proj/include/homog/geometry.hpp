#pragma once

#include "homog/graph.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace homog {

enum class BoundaryConvention { Closed, HalfOpen };
enum class BorderRule { Adjacent, Strict };

struct Box {
  Vec lo;
  Vec hi;
};

// Periodic union of axis-aligned boxes, z + box for z ∈ ℤᵈ.
struct ObstructionSpec {
  int dimension = 2;
  std::vector<Box> boxes;
  // Closed: lattice points on any face of a box are obstructed.
  // HalfOpen: boxes are [lo, hi) per axis.
  BoundaryConvention convention = BoundaryConvention::Closed;
  // Adjacent: border nodes lie within ∞-distance ≤ h of the obstruction.
  // Strict: ∞-distance < h.
  BorderRule border = BorderRule::Adjacent;

  static ObstructionSpec square_quadrant();  // [3/4,1]²
  static ObstructionSpec none(int dimension = 2);

  bool obstructs(const Vec& x) const;
  // ∞-distance from x to the periodic obstruction set (infinite when empty).
  double distance(const Vec& x) const;
  void validate() const;
};

enum class InteractionKind { Neutral, Bonding, Repulsion, Attraction };

std::string_view interaction_name(InteractionKind k);
std::optional<InteractionKind> parse_interaction(std::string_view s);
std::string_view convention_name(BoundaryConvention c);
std::string_view border_name(BorderRule b);

// Parses "1/8", "0.125" or "8" (taken as 1/8 only when written as 1/n).
// Returns n = 1/h. Throws InvalidResolution.
int resolution_from_h(double h);
int parse_resolution(const std::string& text);

// Nodes of hℤᵈ outside the obstruction, nearest-neighbour edges ±h e_i with
// rates set by the interaction. Throws InvalidResolution, EmptyGraph.
QuotientGraph build_obstructed_lattice(int n, const ObstructionSpec& obstruction = ObstructionSpec::square_quadrant(),
                                       InteractionKind interaction = InteractionKind::Neutral);

// Border set B_h as a node mask of a lattice built with the same spec.
std::vector<char> border_nodes(const QuotientGraph& g, int n, const ObstructionSpec& obstruction);

// Adds ±(h,h) (and ±(h,−h) when requested) to the 2-D lattice; rate 1/h²
// between border nodes and 1/(2h²) otherwise.
QuotientGraph build_diagonal_lattice(int n, const ObstructionSpec& obstruction = ObstructionSpec::square_quadrant(),
                                     bool anti_diagonal = false);

QuotientGraph whirlpool_fixture(double lambda_bar = 1.0);

// y_axis ↦ 2c − y_axis (mod 1), or nullopt if some image is not a node.
std::optional<std::vector<int>> reflection_permutation(const QuotientGraph& g, int axis, double center);
// One coordinate reflection per axis that leaves the generator invariant and
// negates that drift component, searching over centers suggested by the node
// set. Axes without one get the identity map.
std::vector<std::vector<int>> find_axis_reflections(const QuotientGraph& g);

}  // namespace homog
