#include "homog/cli.hpp"

#include "homog/ctmc.hpp"
#include "homog/error.hpp"
#include "homog/experiments.hpp"
#include "homog/geometry.hpp"
#include "homog/graph_io.hpp"
#include "homog/homogenize.hpp"
#include "homog/msd.hpp"
#include "homog/reflecting_walk.hpp"
#include "homog/variational.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace homog {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitDrifty = 2;
constexpr int kExitSimulation = 3;

struct GlobalFlags {
  std::uint64_t seed = 1;
  std::string output;
  int threads = 1;
  double tolerance = kNullDriftTolerance;
};

struct BuildFlags {
  std::string geometry = "square-quadrant";
  std::string h = "1/8";
  std::string interaction = "neutral";
  std::string lattice = "axis";
  bool anti_diagonal = false;
  std::string boundary = "closed";
  std::string border = "adjacent";
  double rate = 1.0;
};

struct SimulateFlags {
  std::string graph;
  bool reflecting = false;
  std::string h = "1/8";
  std::string geometry = "square-quadrant";
  double t_end = 100.0;
  int n_paths = 1000;
  int points = 50;
  bool center = false;
  bool trace = false;
  std::string weighting = "ols";
  int bootstrap = 1000;
};

struct ExperimentFlags {
  std::string name;
  std::string h_list;
  int n_paths = 10000;
  double t_end = 20.0;
  std::optional<double> pde_reference;
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::DriftNotCentered:
    case Errc::ReflectionOverflow:
      return kExitSimulation;
    default:
      return kExitInput;
  }
}

void emit(const GlobalFlags& flags, const std::string& text, std::ostream& out) {
  if (flags.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(flags.output, std::ios::binary);
  if (!file) throw Error(Errc::InvalidArgument, "cannot write '" + flags.output + "'");
  file << text;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::InvalidArgument, "cannot write '" + path.string() + "'");
  file << text;
}

ObstructionSpec obstruction_from(const BuildFlags& b) {
  ObstructionSpec spec;
  if (b.geometry == "square-quadrant") {
    spec = ObstructionSpec::square_quadrant();
  } else if (b.geometry == "free") {
    spec = ObstructionSpec::none(2);
  } else {
    throw Error(Errc::InvalidArgument, "unknown geometry '" + b.geometry + "'");
  }
  if (b.boundary == "closed") spec.convention = BoundaryConvention::Closed;
  else if (b.boundary == "half-open") spec.convention = BoundaryConvention::HalfOpen;
  else throw Error(Errc::InvalidArgument, "unknown boundary convention '" + b.boundary + "'");
  if (b.border == "adjacent") spec.border = BorderRule::Adjacent;
  else if (b.border == "strict") spec.border = BorderRule::Strict;
  else throw Error(Errc::InvalidArgument, "unknown border rule '" + b.border + "'");
  return spec;
}

QuotientGraph build_from(const BuildFlags& b) {
  if (b.geometry == "whirlpool") return whirlpool_fixture(b.rate);
  const ObstructionSpec spec = obstruction_from(b);
  const int n = parse_resolution(b.h);
  const auto kind = parse_interaction(b.interaction);
  if (!kind) throw Error(Errc::InvalidArgument, "unknown interaction '" + b.interaction + "'");
  if (b.lattice == "axis") return build_obstructed_lattice(n, spec, *kind);
  if (b.lattice == "diagonal") {
    if (*kind != InteractionKind::Neutral) {
      throw Error(Errc::InvalidArgument, "the diagonal lattice has its own rates; drop --interaction");
    }
    return build_diagonal_lattice(n, spec, b.anti_diagonal);
  }
  throw Error(Errc::InvalidArgument, "unknown lattice '" + b.lattice + "'");
}

std::vector<int> parse_h_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_resolution(item));
  }
  if (out.empty()) throw Error(Errc::InvalidArgument, "h list is empty");
  return out;
}

FitWeighting parse_weighting(const std::string& s) {
  if (s == "ols") return FitWeighting::Ordinary;
  if (s == "inverse-variance") return FitWeighting::InverseVariance;
  throw Error(Errc::InvalidArgument, "unknown weighting '" + s + "'");
}

MsdOptions msd_options(const GlobalFlags& g, const SimulateFlags& s) {
  MsdOptions o;
  o.t_end = s.t_end;
  o.n_points = s.points;
  o.n_paths = s.n_paths;
  o.seed = g.seed;
  o.threads = g.threads;
  o.center = s.center;
  o.bootstrap_resamples = s.bootstrap;
  o.weighting = parse_weighting(s.weighting);
  o.drift_tolerance = g.tolerance;
  return o;
}

int cmd_analyze(const GlobalFlags& flags, const std::string& path, std::ostream& out) {
  const QuotientGraph g = read_graph_file(path);
  AnalyzeOptions options;
  options.tolerance = flags.tolerance;
  options.parallel = flags.threads != 1;
  const HomogenizationResult r = analyze(g, options);
  emit(flags, serialize_result(r), out);
  return r.checks.null_drift ? kExitOk : kExitDrifty;
}

int cmd_simulate(const GlobalFlags& flags, const SimulateFlags& s, std::ostream& out) {
  const MsdOptions options = msd_options(flags, s);
  if (s.reflecting) {
    ReflectingWalkConfig config;
    config.h = 1.0 / parse_resolution(s.h);
    BuildFlags b;
    b.geometry = s.geometry;
    config.geometry = obstruction_from(b);
    MsdEstimate m = estimate_msd(config, options);
    emit(flags, msd_csv(m, {{"walk", "reflecting"}, {"h", s.h}, {"geometry", s.geometry}}), out);
    return kExitOk;
  }
  if (s.graph.empty()) throw Error(Errc::InvalidArgument, "simulate needs a graph file or --reflecting");
  const QuotientGraph g = read_graph_file(s.graph);
  if (s.trace) {
    emit(flags, event_trace_csv(g, simulate_ctmc(g, s.t_end, flags.seed)), out);
    return kExitOk;
  }
  MsdEstimate m = estimate_msd(g, options);
  emit(flags, msd_csv(m, {{"walk", "graph"}, {"graph", std::filesystem::path(s.graph).filename().string()}}), out);
  return kExitOk;
}

struct CheckLine {
  std::string name;
  std::string status;  // pass, fail, skipped
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Runs one check, turning library errors into a failed line.
template <class F>
void run_check(std::vector<CheckLine>& lines, const std::string& name, F&& body) {
  try {
    lines.push_back(body());
    lines.back().name = name;
  } catch (const Error& e) {
    if (e.code() == Errc::NotReversible) lines.push_back({name, "skipped", "not reversible"});
    else lines.push_back({name, "fail", e.what()});
  }
}

CheckLine verdict(bool ok, const std::string& detail) { return {"", ok ? "pass" : "fail", detail}; }

std::vector<CheckLine> verify_graph(const QuotientGraph& g, const GlobalFlags& flags) {
  std::vector<CheckLine> lines;
  AnalyzeOptions options;
  options.tolerance = flags.tolerance;
  const HomogenizationResult r = analyze(g, options);
  const int d = g.dimension();
  const int n = g.num_nodes();

  lines.push_back({"stationary", verdict((r.pi.array() > 0).all(), "min pi " + num(r.pi.minCoeff())).status,
                   "min pi " + num(r.pi.minCoeff())});
  run_check(lines, "drift_forms", [&] {
    const LongRunDrift f = long_run_drift_forms(g, r.pi);
    return verdict(true, "|node - edge| " + num((f.node_form - f.edge_form).cwiseAbs().maxCoeff()));
  });
  run_check(lines, "corrector_residual", [&] {
    const double scale = 1e-9 * (1.0 + r.rho.cwiseAbs().maxCoeff());
    return verdict(r.psi_residual <= scale, num(r.psi_residual));
  });
  if (r.checks.K_equals_C) {
    lines.push_back({"K_equals_C", *r.checks.K_equals_C ? "pass" : "fail", "|K - C| " + num(matrix_inf_norm(*r.K - r.C))});
  } else {
    lines.push_back({"K_equals_C", "skipped", "nonzero drift; K is not defined"});
  }

  run_check(lines, "symmetry", [&] {
    const auto phis = find_axis_reflections(g);
    const SymmetryCheck s = check_symmetry_null_drift(g, phis);
    if (!s.overall) return CheckLine{"", "skipped", "no reflection symmetry on every axis"};
    return verdict(r.checks.null_drift, "reflections found; |u_bar| " + num(r.u_bar_norm));
  });

  if (!is_reversible(g)) {
    for (const char* name : {"divergence_theorem", "divergence_form", "energy_identity", "minimizer", "k_forms"}) {
      lines.push_back({name, "skipped", "not reversible"});
    }
    return lines;
  }

  Rng rng(substream_seed(flags.seed, 11));
  Mat field(g.num_edges(), d);
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& edge = g.edge(e);
    field.row(e) = (g.node(edge.origin).coords + g.node(edge.terminal).coords).transpose();
  }
  Vec f(n);
  for (int y = 0; y < n; ++y) f[y] = uniform01(rng) - 0.5;
  run_check(lines, "divergence_theorem", [&] {
    const double gap = divergence_theorem_check(g, field, f);
    const double scale = field_inner(field.cwiseAbs(), gradient(g, f).cwiseAbs());
    return verdict(gap <= 1e-10 * (1.0 + scale), "gap " + num(gap));
  });

  std::vector<Vec> xis;
  for (int i = 0; i < d; ++i) xis.push_back(Vec::Unit(d, i));
  xis.push_back(Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));

  run_check(lines, "divergence_form", [&] {
    double worst = 0.0;
    for (const Vec& xi : xis) {
      const auto s = unit_cell_divergence_form(g, xi);
      worst = std::max({worst, s.divergence_residual, s.transpose_residual});
    }
    const double scale = 1e-9 * (1.0 + r.rho.cwiseAbs().maxCoeff());
    return verdict(worst <= scale, "max residual " + num(worst));
  });
  run_check(lines, "energy_identity", [&] {
    double worst = 0.0;
    for (const Vec& xi : xis) {
      const auto s = unit_cell_divergence_form(g, xi);
      const double q = xi.dot(*r.K * xi);
      worst = std::max(worst, std::fabs(energy(g, xi, s.upsilon) - q) / (1.0 + std::fabs(q)));
    }
    return verdict(worst <= 1e-9, "max rel gap " + num(worst));
  });
  run_check(lines, "minimizer", [&] {
    bool ok = true;
    for (const Vec& xi : xis) ok = ok && verify_minimizer(g, xi, unit_cell_divergence_form(g, xi).upsilon, 20, flags.seed);
    return verdict(ok, "20 perturbations per direction");
  });
  run_check(lines, "k_forms", [&] {
    const Mat& omega = *r.omega;
    double worst = 0.0;
    bool edge_ok = true;
    for (const Vec& xi : xis) {
      const auto s = unit_cell_divergence_form(g, xi);
      worst = std::max(worst, (k_times(g, xi, s.upsilon) - *r.K * xi).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::fabs(k_quadratic_form(g, xi, omega) - xi.dot(*r.K * xi)));
      const bool positive = xi.dot(*r.K * xi) > 1e-10 * (1.0 + matrix_inf_norm(*r.K));
      edge_ok = edge_ok && edge_condition_holds(g, omega, xi) == positive;
    }
    return verdict(worst <= 1e-9 * (1.0 + matrix_inf_norm(*r.K)) && edge_ok, "max gap " + num(worst));
  });
  return lines;
}

int cmd_verify(const GlobalFlags& flags, const std::string& path, std::ostream& out) {
  std::vector<CheckLine> lines;
  int code = kExitOk;
  try {
    const QuotientGraph g = read_graph_file(path);
    lines.push_back({"graph", "pass", std::to_string(g.num_nodes()) + " nodes, " + std::to_string(g.num_edges()) + " edges"});
    auto rest = verify_graph(g, flags);
    lines.insert(lines.end(), rest.begin(), rest.end());
  } catch (const Error& e) {
    lines.push_back({"graph", "fail", e.what()});
  }
  int passed = 0, failed = 0, skipped = 0;
  std::string text;
  for (const auto& l : lines) {
    if (l.status == "pass") ++passed;
    else if (l.status == "fail") ++failed;
    else ++skipped;
    text += l.name + ": " + l.status + (l.detail.empty() ? "" : " (" + l.detail + ")") + "\n";
  }
  text += "summary: " + std::to_string(passed) + " pass, " + std::to_string(failed) + " fail, " +
          std::to_string(skipped) + " skipped\n";
  if (failed) code = kExitInput;
  emit(flags, text, out);
  return code;
}

int cmd_experiment(const GlobalFlags& flags, const ExperimentFlags& x, std::ostream& out) {
  const std::filesystem::path dir = flags.output.empty() ? std::filesystem::path(".") : std::filesystem::path(flags.output);
  std::filesystem::create_directories(dir);
  AnalyzeOptions options;
  options.tolerance = flags.tolerance;
  std::string csv;
  if (x.name == "path_length") {
    const auto hs = parse_h_list(x.h_list.empty() ? "1/2,1/4,1/8,1/16,1/32,1/64,1/128,1/256,1/512" : x.h_list);
    csv = path_length_csv(run_path_length(hs, options), x.pde_reference);
  } else if (x.name == "interactions") {
    const auto hs = parse_h_list(x.h_list.empty() ? "1/8" : x.h_list);
    if (hs.size() != 1) throw Error(Errc::InvalidArgument, "interactions takes a single h");
    csv = interactions_csv(run_interactions(hs.front(), options));
  } else if (x.name == "continuous_comparison") {
    const auto hs = parse_h_list(x.h_list.empty() ? "1/2,1/4,1/8,1/16" : x.h_list);
    MsdOptions mc;
    mc.t_end = x.t_end;
    mc.n_paths = x.n_paths;
    mc.seed = flags.seed;
    mc.threads = flags.threads;
    mc.drift_tolerance = flags.tolerance;
    csv = continuous_csv(run_continuous_comparison(hs, mc), mc);
  } else {
    throw Error(Errc::InvalidArgument, "unknown experiment '" + x.name + "'");
  }
  write_file(dir / (x.name + ".csv"), csv);
  write_file(dir / (x.name + ".svg"), render_svg(csv));
  out << (dir / (x.name + ".csv")).string() << "\n" << (dir / (x.name + ".svg")).string() << "\n";
  return kExitOk;
}

int cmd_plot(const GlobalFlags& flags, const std::string& path, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  emit(flags, render_svg(buf.str()), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective diffusivity of periodic random walks"};
  app.set_help_flag("--help", "Print help");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--output,-o", flags.output, "Output file (directory for experiment)");
  app.add_option("--threads", flags.threads, "Monte Carlo threads, 0 for all")->check(CLI::NonNegativeNumber);
  app.add_option("--tolerance", flags.tolerance, "Null-drift tolerance")->check(CLI::PositiveNumber);

  BuildFlags build;
  auto* build_cmd = app.add_subcommand("build", "Write a geometry graph file");
  build_cmd->add_option("--geometry", build.geometry, "square-quadrant, free or whirlpool");
  build_cmd->add_option("--h", build.h, "Lattice spacing, e.g. 1/8");
  build_cmd->add_option("--interaction", build.interaction, "neutral, bonding, repulsion or attraction");
  build_cmd->add_option("--lattice", build.lattice, "axis or diagonal");
  build_cmd->add_flag("--anti-diagonal", build.anti_diagonal, "Also add ±(h,-h) jumps");
  build_cmd->add_option("--boundary", build.boundary, "closed or half-open");
  build_cmd->add_option("--border", build.border, "adjacent or strict");
  build_cmd->add_option("--rate", build.rate, "Whirlpool edge rate")->check(CLI::PositiveNumber);

  std::string graph_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "Homogenize a graph file");
  analyze_cmd->add_option("graph", graph_path, "Graph file")->required();

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Mean squared displacement by Monte Carlo");
  sim_cmd->add_option("graph", sim.graph, "Graph file");
  sim_cmd->add_flag("--reflecting", sim.reflecting, "Continuous reflecting walk instead of a graph");
  sim_cmd->add_option("--h", sim.h, "Step length of the reflecting walk");
  sim_cmd->add_option("--geometry", sim.geometry, "square-quadrant or free");
  sim_cmd->add_option("--t-end", sim.t_end, "Time horizon")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n-paths", sim.n_paths, "Number of paths");
  sim_cmd->add_option("--points", sim.points, "Time grid points");
  sim_cmd->add_flag("--center", sim.center, "Subtract the long-run drift");
  sim_cmd->add_flag("--trace", sim.trace, "Write one jump trace instead of the MSD");
  sim_cmd->add_option("--weighting", sim.weighting, "ols or inverse-variance");
  sim_cmd->add_option("--bootstrap", sim.bootstrap, "Bootstrap resamples");

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant battery on a graph file");
  verify_cmd->add_option("graph", verify_path, "Graph file")->required();

  ExperimentFlags exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Reproduce a figure as CSV and SVG");
  exp_cmd->add_option("name", exp.name, "path_length, interactions or continuous_comparison")->required();
  exp_cmd->add_option("--h-list", exp.h_list, "Comma separated spacings");
  exp_cmd->add_option("--n-paths", exp.n_paths, "Monte Carlo paths");
  exp_cmd->add_option("--t-end", exp.t_end, "Monte Carlo horizon")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--pde-reference", exp.pde_reference, "Reference line for path_length");

  std::string plot_path;
  auto* plot_cmd = app.add_subcommand("plot", "Render a CSV as SVG");
  plot_cmd->add_option("csv", plot_path, "CSV file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*build_cmd) {
      emit(flags, serialize_graph(build_from(build)), out);
      return kExitOk;
    }
    if (*analyze_cmd) return cmd_analyze(flags, graph_path, out);
    if (*sim_cmd) return cmd_simulate(flags, sim, out);
    if (*verify_cmd) return cmd_verify(flags, verify_path, out);
    if (*exp_cmd) return cmd_experiment(flags, exp, out);
    if (*plot_cmd) return cmd_plot(flags, plot_path, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace homog
