#include "homog/ctmc.hpp"

#include "homog/error.hpp"
#include "homog/graph_io.hpp"

#include <algorithm>
#include <limits>

namespace homog {

CtmcSampler::CtmcSampler(const QuotientGraph& g) : dim_(g.dimension()) {
  const int n = g.num_nodes();
  offset_.reserve(static_cast<std::size_t>(n) + 1);
  offset_.push_back(0);
  total_.assign(static_cast<std::size_t>(n), 0.0);
  for (int y = 0; y < n; ++y) {
    double acc = 0.0;
    for (int e : g.out_edges(y)) {
      const auto& edge = g.edge(e);
      acc += edge.rate;
      cumulative_.push_back(acc);
      edge_.push_back(e);
      terminal_.push_back(edge.terminal);
      for (int i = 0; i < dim_; ++i) jumps_.push_back(edge.jump[i]);
    }
    total_[static_cast<std::size_t>(y)] = acc;
    offset_.push_back(static_cast<int>(edge_.size()));
  }
}

int CtmcSampler::jump(WalkState& s, Rng& rng) const {
  const auto y = static_cast<std::size_t>(s.quotient_node);
  const double target = uniform01(rng) * total_[y];
  int k = offset_[y];
  const int last = offset_[y + 1] - 1;
  while (k < last && cumulative_[static_cast<std::size_t>(k)] <= target) ++k;
  const double* nu = jumps_.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(dim_);
  for (int i = 0; i < dim_; ++i) s.displacement[i] += nu[i];
  s.quotient_node = terminal_[static_cast<std::size_t>(k)];
  return edge_[static_cast<std::size_t>(k)];
}

void CtmcSampler::sample_grid(int start, const Vec& times, Rng& rng, Mat& out) const {
  out.resize(times.size(), dim_);
  WalkState s{start, Vec::Zero(dim_), 0.0};
  auto hold = [&](int y) {
    const double rate = total_[static_cast<std::size_t>(y)];
    return rate > 0.0 ? exponential(rng, rate) : std::numeric_limits<double>::infinity();
  };
  double next = hold(start);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    while (next <= times[i]) {
      jump(s, rng);
      next += hold(s.quotient_node);
    }
    out.row(i) = s.displacement.transpose();
  }
}

int CtmcSampler::sample_node(const Vec& cumulative, Rng& rng) const {
  const double u = uniform01(rng) * cumulative[cumulative.size() - 1];
  const double* first = cumulative.data();
  const double* last = first + cumulative.size();
  const auto it = std::upper_bound(first, last, u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - first, cumulative.size() - 1));
}

std::vector<JumpEvent> simulate_ctmc(const QuotientGraph& g, double t_end, std::uint64_t seed, int start) {
  if (!(t_end >= 0.0)) throw Error(Errc::InvalidArgument, "t_end must be non-negative");
  if (start < 0 || start >= g.num_nodes()) throw Error(Errc::InvalidArgument, "start node out of range");
  const CtmcSampler sampler(g);
  Rng rng(substream_seed(seed, 0));
  WalkState s{start, Vec::Zero(g.dimension()), 0.0};
  std::vector<JumpEvent> events;
  if (sampler.total_rate(start) <= 0.0) return events;
  while (true) {
    s.time += exponential(rng, sampler.total_rate(s.quotient_node));
    if (s.time > t_end) break;
    const int e = sampler.jump(s, rng);
    events.push_back(JumpEvent{s.time, e, s.quotient_node, s.displacement});
  }
  return events;
}

Vec occupation_fractions(const QuotientGraph& g, double t_end, std::uint64_t seed, int start) {
  if (!(t_end > 0.0)) throw Error(Errc::InvalidArgument, "t_end must be positive");
  const auto events = simulate_ctmc(g, t_end, seed, start);
  Vec occ = Vec::Zero(g.num_nodes());
  double last = 0.0;
  int node = start;
  for (const auto& ev : events) {
    occ[node] += ev.time - last;
    last = ev.time;
    node = ev.node;
  }
  occ[node] += t_end - last;
  return occ / t_end;
}

std::string event_trace_csv(const QuotientGraph& g, const std::vector<JumpEvent>& events) {
  std::string out = "time,node";
  for (int i = 0; i < g.dimension(); ++i) out += ",dx" + std::to_string(i + 1);
  out += "\n";
  for (const auto& ev : events) {
    out += format_number(ev.time) + "," + std::to_string(ev.node);
    for (int i = 0; i < g.dimension(); ++i) out += "," + format_number(ev.displacement[i]);
    out += "\n";
  }
  return out;
}

}  // namespace homog
