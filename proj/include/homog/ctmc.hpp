#pragma once

#include "homog/graph.hpp"
#include "homog/rng.hpp"

#include <cstdint>
#include <vector>

namespace homog {

struct WalkState {
  int quotient_node = 0;
  Vec displacement;  // lifted position minus the start, unit-cell lengths
  double time = 0.0;
};

// State right after a jump.
struct JumpEvent {
  double time = 0.0;
  int edge = 0;
  int node = 0;
  Vec displacement;
};

// Flattened jump tables for the embedded chain: hold Exp(λ⁰(y)), then take
// edge e ∈ E_y with probability λ_e/λ⁰(y).
class CtmcSampler {
 public:
  explicit CtmcSampler(const QuotientGraph& g);

  int dimension() const { return dim_; }
  int num_nodes() const { return static_cast<int>(total_.size()); }
  double total_rate(int y) const { return total_[static_cast<std::size_t>(y)]; }

  // Advances one jump; returns the edge taken. Assumes total_rate(y) > 0.
  int jump(WalkState& s, Rng& rng) const;
  // Displacements at the (ascending) times, written as rows of `out`.
  void sample_grid(int start, const Vec& times, Rng& rng, Mat& out) const;
  int sample_node(const Vec& cumulative, Rng& rng) const;

 private:
  int dim_ = 0;
  std::vector<int> offset_;
  std::vector<double> cumulative_;
  std::vector<int> edge_;
  std::vector<int> terminal_;
  std::vector<double> jumps_;  // flattened ν, dim_ per edge
  std::vector<double> total_;
};

std::vector<JumpEvent> simulate_ctmc(const QuotientGraph& g, double t_end, std::uint64_t seed, int start = 0);
// Fraction of [0, t_end] spent in each node.
Vec occupation_fractions(const QuotientGraph& g, double t_end, std::uint64_t seed, int start = 0);

// CSV rows time,node,dx1..dxd.
std::string event_trace_csv(const QuotientGraph& g, const std::vector<JumpEvent>& events);

}  // namespace homog
