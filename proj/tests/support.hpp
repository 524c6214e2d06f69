#pragma once

#include "homog/graph.hpp"
#include "homog/rng.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace homog::testing {

enum class Family { Arbitrary, Reversible, PointSymmetric };

// Random strongly connected quotient graphs on a 1/16 grid. Reversible
// graphs pair every edge with an equal-rate reversal; point-symmetric graphs
// are invariant under y ↦ −y with jumps negated, which forces null drift
// without detailed balance.
class GraphFactory {
 public:
  explicit GraphFactory(std::uint64_t seed, int dim = 2) : rng_(seed), dim_(dim) {}

  QuotientGraph make(Family family, int max_nodes) {
    coords_.clear();
    raw_.clear();
    keys_.clear();
    const int n = family == Family::PointSymmetric ? 2 * uniform_int(1, std::max(1, max_nodes / 2))
                                                   : uniform_int(1, max_nodes);
    std::set<std::vector<int>> used;
    while (static_cast<int>(coords_.size()) < n) {
      std::vector<int> p(static_cast<std::size_t>(dim_));
      for (auto& v : p) v = uniform_int(0, 15);
      if (family == Family::PointSymmetric) {
        std::vector<int> q = mirror(p);
        if (q == p || used.count(p) || used.count(q)) continue;
        used.insert(p);
        used.insert(q);
        coords_.push_back(p);
        coords_.push_back(q);
      } else {
        if (!used.insert(p).second) continue;
        coords_.push_back(p);
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int attempt = 0; attempt < 50 && !add(family, i, (i + 1) % n, rate()); ++attempt) {
      }
    }
    const int extra = uniform_int(0, 2 * n);
    for (int k = 0; k < extra; ++k) add(family, uniform_int(0, n - 1), uniform_int(0, n - 1), rate());

    std::vector<Vec> nodes;
    for (const auto& p : coords_) {
      Vec c(dim_);
      for (int i = 0; i < dim_; ++i) c[i] = p[static_cast<std::size_t>(i)] / 16.0;
      nodes.push_back(c);
    }
    return build_quotient_graph(dim_, nodes, raw_);
  }

  Rng& rng() { return rng_; }

 private:
  int uniform_int(int lo, int hi) { return lo + static_cast<int>(uniform01(rng_) * (hi - lo + 1)); }
  double rate() { return 0.2 + 2.8 * uniform01(rng_); }

  std::vector<int> mirror(const std::vector<int>& p) const {
    std::vector<int> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = (16 - p[i]) % 16;
    return q;
  }
  int index_of(const std::vector<int>& p) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == p) return static_cast<int>(i);
    return -1;
  }

  // Jump in 1/16 units from a to b plus a random integer cell offset.
  bool push(int a, const std::vector<int>& jump, double r) {
    bool zero = true;
    for (int v : jump) zero = zero && v == 0;
    if (zero || !keys_.insert({a, jump}).second) return false;
    Vec nu(dim_);
    for (int i = 0; i < dim_; ++i) nu[i] = jump[static_cast<std::size_t>(i)] / 16.0;
    raw_.push_back(RawEdge{a, nu, r});
    return true;
  }

  bool add(Family family, int a, int b, double r) {
    std::vector<int> jump(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      const auto k = static_cast<std::size_t>(i);
      jump[k] = coords_[static_cast<std::size_t>(b)][k] - coords_[static_cast<std::size_t>(a)][k] + 16 * uniform_int(-1, 1);
    }
    std::vector<int> back(jump.size());
    for (std::size_t i = 0; i < jump.size(); ++i) back[i] = -jump[i];
    if (family == Family::Reversible) {
      if (keys_.count({a, jump}) || keys_.count({b, back})) return false;
      if (!push(a, jump, r)) return false;
      if (a == b && jump == back) return true;
      push(b, back, r);
      return true;
    } else if (family == Family::PointSymmetric) {
      const int ma = index_of(mirror(coords_[static_cast<std::size_t>(a)]));
      if (keys_.count({a, jump}) || keys_.count({ma, back})) return false;
      if (!push(a, jump, r)) return false;
      push(ma, back, r);
      return true;
    }
    return push(a, jump, r);
  }

  Rng rng_;
  int dim_;
  std::vector<std::vector<int>> coords_;
  std::vector<RawEdge> raw_;
  std::set<std::pair<int, std::vector<int>>> keys_;
};

inline Vec random_vec(Rng& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * uniform01(rng) - 1.0;
  return v;
}

inline Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = 2.0 * uniform01(rng) - 1.0;
  return m;
}

inline QuotientGraph one_node_walk(double right, double left) {
  return build_quotient_graph(1, {Vec::Zero(1)}, {{0, Vec::Constant(1, 1.0), right}, {0, Vec::Constant(1, -1.0), left}});
}

inline QuotientGraph two_node_chain(double a, double b) {
  // Nodes 0 and 1/2, jumps ±1/2; rates a out of node 0, b out of node 1.
  Vec x0 = Vec::Zero(1), x1 = Vec::Constant(1, 0.5), p = Vec::Constant(1, 0.5), m = Vec::Constant(1, -0.5);
  return build_quotient_graph(1, {x0, x1}, {{0, p, a}, {0, m, a}, {1, p, b}, {1, m, b}});
}

}  // namespace homog::testing
