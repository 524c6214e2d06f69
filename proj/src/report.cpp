#include "homog/graph_io.hpp"
#include "homog/homogenize.hpp"

namespace homog {

namespace {

void put(std::string& out, const std::string& key, const std::string& value) { out += key + "=" + value + "\n"; }

std::string flag(bool b) { return b ? "true" : "false"; }

void put_block(std::string& out, const std::string& name, const Mat& m) {
  out += "[" + name + "]\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? " " : "") + format_number(m(i, j));
    out += "\n";
  }
}

}  // namespace

std::string serialize_result(const HomogenizationResult& r) {
  std::string out;
  put(out, "dimension", std::to_string(r.dimension));
  put(out, "nodes", std::to_string(r.pi.size()));
  put(out, "backend", std::string(backend_name(r.backend)));
  put(out, "centered", flag(r.centered));
  put(out, "null_drift", flag(r.checks.null_drift));
  put(out, "u_bar_norm", format_number(r.u_bar_norm));
  put(out, "detailed_balance", flag(r.checks.detailed_balance.holds()));
  put(out, "detailed_balance_reason", r.checks.detailed_balance.reason());
  put(out, "K_equals_C", r.checks.K_equals_C ? flag(*r.checks.K_equals_C) : "absent");
  put(out, "C_positive_definite", flag(r.checks.C_positive_definite));
  put(out, "alpha_spans", flag(r.checks.alpha_spans));
  put(out, "psi_residual", format_number(r.psi_residual));
  if (r.omega) put(out, "omega_residual", format_number(r.omega_residual));
  for (int i = 0; i < r.dimension; ++i) {
    for (int j = 0; j < r.dimension; ++j) {
      put(out, "C" + std::to_string(i + 1) + std::to_string(j + 1), format_number(r.C(i, j)));
    }
  }
  put(out, "D_e", format_number(r.scalar_diffusivity()));
  put_block(out, "u_bar", r.u_bar.transpose());
  put_block(out, "C", r.C);
  if (r.K) put_block(out, "K", *r.K);
  put_block(out, "pi", r.pi);
  return out;
}

}  // namespace homog
