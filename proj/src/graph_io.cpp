#include "homog/graph_io.hpp"

#include "homog/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace homog {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& token, int line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) parse_fail(line, "bad number '" + token + "'");
  return value;
}

int parse_index(const std::string& token, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) parse_fail(line, "bad index '" + token + "'");
  return value;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error(Errc::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

QuotientGraph parse_graph(std::istream& in) {
  int dim = 0;
  std::vector<std::string> annotations;
  std::vector<std::pair<int, Vec>> nodes;
  struct PendingEdge {
    int line;
    RawEdge edge;
  };
  std::vector<PendingEdge> edges;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      annotations.push_back(trim(line.substr(1)));
      continue;
    }
    if (line.rfind("d=", 0) == 0) {
      if (dim != 0) parse_fail(line_no, "repeated dimension header");
      dim = parse_index(trim(line.substr(2)), line_no);
      if (dim < 1) parse_fail(line_no, "dimension must be positive");
      continue;
    }
    std::istringstream tokens(line);
    std::string kind;
    tokens >> kind;
    std::vector<std::string> fields;
    for (std::string t; tokens >> t;) fields.push_back(t);
    if (kind != "node" && kind != "edge") parse_fail(line_no, "unknown record '" + kind + "'");
    if (dim == 0) parse_fail(line_no, "record before d= header");

    if (kind == "node") {
      if (fields.size() != static_cast<std::size_t>(dim) + 1) parse_fail(line_no, "node needs index and d coordinates");
      Vec coords(dim);
      for (int i = 0; i < dim; ++i) coords[i] = parse_number(fields[static_cast<std::size_t>(i) + 1], line_no);
      nodes.emplace_back(parse_index(fields[0], line_no), std::move(coords));
    } else {
      if (fields.size() != static_cast<std::size_t>(dim) + 2) parse_fail(line_no, "edge needs origin, d jump entries and a rate");
      RawEdge e;
      e.origin = parse_index(fields[0], line_no);
      e.jump.resize(dim);
      for (int i = 0; i < dim; ++i) e.jump[i] = parse_number(fields[static_cast<std::size_t>(i) + 1], line_no);
      e.rate = parse_number(fields.back(), line_no);
      edges.push_back({line_no, std::move(e)});
    }
  }
  if (dim == 0) parse_fail(line_no, "missing d= header");

  // Node indices in the file are labels; they must be a permutation of 0..n-1.
  std::vector<Vec> coords(nodes.size());
  std::vector<char> seen(nodes.size(), 0);
  for (const auto& [index, c] : nodes) {
    if (index < 0 || static_cast<std::size_t>(index) >= nodes.size()) {
      throw Error(Errc::ParseError, "node index " + std::to_string(index) + " out of range");
    }
    if (seen[static_cast<std::size_t>(index)]) {
      throw Error(Errc::ParseError, "node index " + std::to_string(index) + " repeated");
    }
    seen[static_cast<std::size_t>(index)] = 1;
    coords[static_cast<std::size_t>(index)] = c;
  }
  std::vector<RawEdge> raw_edges;
  raw_edges.reserve(edges.size());
  for (auto& p : edges) {
    if (p.edge.origin < 0 || static_cast<std::size_t>(p.edge.origin) >= nodes.size()) {
      parse_fail(p.line, "edge origin " + std::to_string(p.edge.origin) + " is not a node");
    }
    raw_edges.push_back(std::move(p.edge));
  }
  return build_quotient_graph(dim, coords, raw_edges, std::move(annotations));
}

QuotientGraph parse_graph_string(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

QuotientGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  return parse_graph(in);
}

std::string serialize_graph(const QuotientGraph& g) {
  const int n = g.num_nodes();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lex_less(g.node(a).coords, g.node(b).coords); });
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  std::vector<int> edge_order(static_cast<std::size_t>(g.num_edges()));
  std::iota(edge_order.begin(), edge_order.end(), 0);
  std::sort(edge_order.begin(), edge_order.end(), [&](int a, int b) {
    const int ra = rank[static_cast<std::size_t>(g.edge(a).origin)];
    const int rb = rank[static_cast<std::size_t>(g.edge(b).origin)];
    if (ra != rb) return ra < rb;
    return lex_less(g.edge(a).jump, g.edge(b).jump);
  });

  std::string out;
  for (const auto& a : g.annotations()) out += "# " + a + "\n";
  out += "d=" + std::to_string(g.dimension()) + "\n";
  for (int i = 0; i < n; ++i) {
    out += "node " + std::to_string(i);
    const Vec& c = g.node(order[static_cast<std::size_t>(i)]).coords;
    for (Eigen::Index k = 0; k < c.size(); ++k) out += " " + format_number(c[k]);
    out += "\n";
  }
  for (int e : edge_order) {
    const auto& edge = g.edge(e);
    out += "edge " + std::to_string(rank[static_cast<std::size_t>(edge.origin)]);
    for (Eigen::Index k = 0; k < edge.jump.size(); ++k) out += " " + format_number(edge.jump[k]);
    out += " " + format_number(edge.rate) + "\n";
  }
  return out;
}

void write_graph_file(const QuotientGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
  out << serialize_graph(g);
}

}  // namespace homog
