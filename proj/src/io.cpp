#include "birkhoff/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "birkhoff/error.hpp"
#include "json.hpp"

namespace birkhoff {

namespace {

using json = nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

json vector_json(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

// Row-major nested arrays.
json matrix_json(const Eigen::MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) out.push_back(vector_json(Eigen::VectorXd(M.row(r).transpose())));
  return out;
}

json report_to_json(const PontryaginReport& report) {
  json blocks = json::object();
  for (const auto& [name, value] : report.residuals.blocks) blocks[name] = number(value);
  return {{"variant", to_string(report.variant)},
          {"blocks", blocks},
          {"max_residual", number(report.residuals.max())},
          {"tolerance", number(report.tolerance)},
          {"hamiltonian_spread", number(report.hamiltonian_spread)},
          {"pass", report.pass}};
}

std::string form_label(const PrimalForm& form) {
  return std::string(to_string(form.tag)) + (form.scaled ? "_scaled" : "");
}

}  // namespace

std::string birkhoff_json(const BirkhoffSystem& sys) {
  const Grid& g = sys.grid();
  json j = {{"kind", short_tag(g.kind())},
            {"N", sys.order()},
            {"domain", {number(g.domain().lower), number(g.domain().upper)}},
            {"nodes", vector_json(g.nodes())},
            {"weights", vector_json(sys.weights())},
            {"B_a", matrix_json(sys.B_a())},
            {"B_b", matrix_json(sys.B_b())},
            {"D", matrix_json(sys.D())},
            {"transform_residual", number(sys.modal().transform_residual)},
            {"integration_by_parts_norm", number(integration_by_parts_norm(sys))}};
  return j.dump(2) + "\n";
}

std::string report_json(const PontryaginReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string solution_json(const SolutionRecord& r) {
  json primal = {{"X", matrix_json(r.primal.X)},
                 {"U", matrix_json(r.primal.U)},
                 {"V", matrix_json(r.primal.V)},
                 {"x_a", vector_json(r.primal.x_a)},
                 {"x_b", vector_json(r.primal.x_b)}};
  json j = {{"problem", r.problem},
            {"method", r.method},
            {"form", form_label(r.form)},
            {"grid", short_tag(r.kind)},
            {"N", r.N},
            {"status", r.status},
            {"iterations", r.iterations},
            {"residual", number(r.residual)},
            {"cost", number(r.primal.objective)},
            {"equivalency_residual", number(r.primal.equivalency_residual)},
            {"primal", primal}};
  j["variant"] = r.variant ? json(to_string(*r.variant)) : json(nullptr);
  if (r.dual) {
    j["dual"] = {{"Lambda", matrix_json(r.dual->Lambda)},
                 {"Omega", matrix_json(r.dual->Omega)},
                 {"lambda_a", vector_json(r.dual->lambda_a)},
                 {"lambda_b", vector_json(r.dual->lambda_b)},
                 {"nu", vector_json(r.dual->nu)}};
  } else {
    j["dual"] = nullptr;
  }
  j["verification"] = r.report ? report_to_json(*r.report) : json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2) + "\n";
}

std::string trajectory_csv(const BirkhoffSystem& sys, const PrimalSolution& p, const DualTrajectory* d) {
  std::ostringstream os;
  os << "t";
  for (Eigen::Index i = 0; i < p.X.rows(); ++i) os << ",x" << i;
  for (Eigen::Index c = 0; c < p.U.rows(); ++c) os << ",u" << c;
  if (d) {
    for (Eigen::Index i = 0; i < d->Lambda.rows(); ++i) os << ",lambda" << i;
  }
  os << '\n';
  for (int k = 0; k < sys.size(); ++k) {
    os << format_double(sys.grid().node(k));
    for (Eigen::Index i = 0; i < p.X.rows(); ++i) os << ',' << format_double(p.X(i, k));
    for (Eigen::Index c = 0; c < p.U.rows(); ++c) os << ',' << format_double(p.U(c, k));
    if (d) {
      for (Eigen::Index i = 0; i < d->Lambda.rows(); ++i) os << ',' << format_double(d->Lambda(i, k));
    }
    os << '\n';
  }
  return os.str();
}

std::string dual_csv(const BirkhoffSystem& sys, const DualTrajectory& d) {
  std::ostringstream os;
  os << "node,t";
  for (Eigen::Index i = 0; i < d.Lambda.rows(); ++i) os << ",lambda" << i;
  for (Eigen::Index i = 0; i < d.Omega.rows(); ++i) os << ",omega" << i;
  os << '\n';
  for (int k = 0; k < sys.size(); ++k) {
    os << k << ',' << format_double(sys.grid().node(k));
    for (Eigen::Index i = 0; i < d.Lambda.rows(); ++i) os << ',' << format_double(d.Lambda(i, k));
    for (Eigen::Index i = 0; i < d.Omega.rows(); ++i) os << ',' << format_double(d.Omega(i, k));
    os << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidConfig, "write to '" + path + "' failed");
}

}  // namespace birkhoff
