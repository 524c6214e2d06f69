#include "homog/error.hpp"
#include "homog/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace homog {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_number(const std::string& s) {
  double v = std::numeric_limits<double>::quiet_NaN();
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  int column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::InvalidArgument, "plot: no column '" + name + "'");
    return static_cast<int>(it - header.begin());
  }
};

Table parse_table(const std::string& csv) {
  Table t;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      body.erase(0, body.find_first_not_of(' '));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    const auto cells = split(line, ',');
    if (t.header.empty()) {
      t.header = cells;
      t.columns.assign(cells.size(), {});
      continue;
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      t.columns[i].push_back(i < cells.size() ? to_number(cells[i]) : std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (t.header.empty()) throw Error(Errc::ParseError, "plot: CSV has no header");
  return t;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_svg(const std::string& csv) {
  const Table t = parse_table(csv);
  const std::string x_name = t.meta.count("plot.x") ? t.meta.at("plot.x") : t.header.front();
  std::vector<std::string> series;
  if (t.meta.count("plot.y")) {
    series = split(t.meta.at("plot.y"), ',');
  } else {
    for (const auto& h : t.header)
      if (h != x_name) series.push_back(h);
  }
  const auto& xs = t.columns[t.column(x_name)];

  struct Err {
    int lo, hi;
  };
  std::map<std::string, Err> errors;
  for (const auto& s : series) {
    auto it = t.meta.find("plot.err." + s);
    if (it == t.meta.end()) continue;
    const auto parts = split(it->second, ':');
    if (parts.size() != 2) throw Error(Errc::ParseError, "plot: error spec must be lo:hi");
    errors[s] = Err{t.column(parts[0]), t.column(parts[1])};
  }
  std::optional<double> hline;
  if (t.meta.count("plot.hline")) hline = to_number(t.meta.at("plot.hline"));

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto grow_y = [&](double v) {
    if (std::isfinite(v)) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  };
  for (std::size_t r = 0; r < xs.size(); ++r) {
    if (!std::isfinite(xs[r])) continue;
    xmin = std::min(xmin, xs[r]);
    xmax = std::max(xmax, xs[r]);
    for (const auto& s : series) {
      grow_y(t.columns[t.column(s)][r]);
      if (errors.count(s)) {
        grow_y(t.columns[errors[s].lo][r]);
        grow_y(t.columns[errors[s].hi][r]);
      }
    }
  }
  if (hline && std::isfinite(*hline)) grow_y(*hline);
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) throw Error(Errc::InvalidArgument, "plot: no finite data");
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double width = 640, height = 420, left = 70, right = 170, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  if (t.meta.count("plot.title")) {
    out += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(t.meta.at("plot.title")) + "</text>\n";
  }
  out += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top) + "\" width=\"" + fmt("%.1f", pw) +
         "\" height=\"" + fmt("%.1f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"" + fmt("%.1f", top + ph + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + fmt("%.4g", xv) + "</text>\n";
    out += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", py(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt("%.4g", yv) + "</text>\n";
  }
  out += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", height - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_name) + "</text>\n";

  if (hline && std::isfinite(*hline)) {
    out += "<line x1=\"" + fmt("%.1f", left) + "\" x2=\"" + fmt("%.1f", left + pw) + "\" y1=\"" +
           fmt("%.1f", py(*hline)) + "\" y2=\"" + fmt("%.1f", py(*hline)) +
           "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    const auto& ys = t.columns[t.column(series[s])];
    std::string points;
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (!std::isfinite(xs[r]) || !std::isfinite(ys[r])) continue;
      points += fmt("%.1f", px(xs[r])) + "," + fmt("%.1f", py(ys[r])) + " ";
    }
    if (!points.empty()) points.pop_back();
    out += std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    for (std::size_t r = 0; r < xs.size(); ++r) {
      if (!std::isfinite(xs[r]) || !std::isfinite(ys[r])) continue;
      out += "<circle cx=\"" + fmt("%.1f", px(xs[r])) + "\" cy=\"" + fmt("%.1f", py(ys[r])) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
      auto it = errors.find(series[s]);
      if (it != errors.end()) {
        const double lo = t.columns[it->second.lo][r], hi = t.columns[it->second.hi][r];
        if (std::isfinite(lo) && std::isfinite(hi)) {
          out += "<line x1=\"" + fmt("%.1f", px(xs[r])) + "\" x2=\"" + fmt("%.1f", px(xs[r])) + "\" y1=\"" +
                 fmt("%.1f", py(lo)) + "\" y2=\"" + fmt("%.1f", py(hi)) + "\" stroke=\"" + color + "\"/>\n";
        }
      }
    }
    const double ly = top + 16 + 18 * static_cast<double>(s);
    out += "<line x1=\"" + fmt("%.1f", left + pw + 12) + "\" x2=\"" + fmt("%.1f", left + pw + 32) + "\" y1=\"" +
           fmt("%.1f", ly) + "\" y2=\"" + fmt("%.1f", ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt("%.1f", left + pw + 38) + "\" y=\"" + fmt("%.1f", ly + 4) + "\" font-size=\"12\">" +
           escape(series[s]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace homog
