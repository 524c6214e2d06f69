#pragma once

#include "homog/graph.hpp"

#include <iosfwd>
#include <string>

namespace homog {

// Text format:
//   # free-form annotation lines
//   d=<dim>
//   node <index> <c1> ... <cd>
//   edge <origin> <nu1> ... <nud> <rate>
QuotientGraph parse_graph(std::istream& in);
QuotientGraph parse_graph_string(const std::string& text);
QuotientGraph read_graph_file(const std::string& path);

// Canonical form: nodes sorted lexicographically by coordinates and
// renumbered, edges sorted by (origin, jump). Numbers use the shortest
// representation that round-trips.
std::string serialize_graph(const QuotientGraph& g);
void write_graph_file(const QuotientGraph& g, const std::string& path);

std::string format_number(double x);

}  // namespace homog
