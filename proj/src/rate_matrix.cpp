#include "homog/rate_matrix.hpp"

namespace homog {

RateMatrix build_rate_matrix(const QuotientGraph& g) {
  const int n = g.num_nodes();
  RateMatrix r;
  r.total_rate = Vec::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(g.num_edges()) * 2);
  for (const auto& e : g.edges()) {
    r.total_rate[e.origin] += e.rate;
    if (e.origin == e.terminal) continue;
    triplets.emplace_back(e.origin, e.terminal, e.rate);
    triplets.emplace_back(e.origin, e.origin, -e.rate);
  }
  r.entries.resize(n, n);
  r.entries.setFromTriplets(triplets.begin(), triplets.end());
  r.entries.makeCompressed();
  return r;
}

Mat apply_generator(const QuotientGraph& g, const Mat& f) {
  Mat out = Mat::Zero(f.rows(), f.cols());
  for (const auto& e : g.edges()) out.row(e.origin) += (f.row(e.terminal) - f.row(e.origin)) * e.rate;
  return out;
}

Mat apply_generator_transpose(const QuotientGraph& g, const Mat& f) {
  Mat out = Mat::Zero(f.rows(), f.cols());
  for (const auto& e : g.edges()) {
    out.row(e.terminal) += f.row(e.origin) * e.rate;
    out.row(e.origin) -= f.row(e.origin) * e.rate;
  }
  return out;
}

}  // namespace homog
