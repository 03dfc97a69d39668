#include <cmath>
#include <fstream>
#include <sstream>

#include "birkhoff/error.hpp"
#include "birkhoff/ocp.hpp"
#include "json.hpp"

namespace birkhoff {

namespace {

using json = nlohmann::json;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

Mat read_matrix(const json& j, const char* key, Eigen::Index rows, Eigen::Index cols) {
  if (!j.contains(key)) bad(std::string("missing key '") + key + "'");
  const json& m = j.at(key);
  if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != rows) {
    bad(std::string("'") + key + "' must have " + std::to_string(rows) + " rows");
  }
  Mat out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(std::string("'") + key + "' row " + std::to_string(r) + " must have " +
          std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return out;
}

Vec read_vector(const json& j, const char* key, Eigen::Index size) {
  const json& v = j.at(key);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
    bad(std::string("'") + key + "' must have " + std::to_string(size) + " entries");
  }
  Vec out(size);
  for (Eigen::Index k = 0; k < size; ++k) out[k] = v[static_cast<std::size_t>(k)].get<double>();
  return out;
}

BenchmarkProblem parse(const json& j) {
  const std::string name = j.value("name", std::string("json-problem"));
  if (!j.contains("A") || !j.at("A").is_array() || j.at("A").empty()) bad("'A' must be a non-empty matrix");
  const auto n = static_cast<Eigen::Index>(j.at("A").size());
  const json& Bj = j.value("B", json::array());
  const Eigen::Index m = Bj.empty() ? 0 : static_cast<Eigen::Index>(Bj.at(0).size());

  double t0 = 0.0;
  double tf = 1.0;
  if (j.contains("horizon")) {
    const Vec h = read_vector(j, "horizon", 2);
    t0 = h[0];
    tf = h[1];
    if (!(std::isfinite(t0) && std::isfinite(tf) && t0 < tf)) bad("'horizon' must be [t0, tf] with t0 < tf");
  }

  const Mat A = read_matrix(j, "A", n, n);
  const Mat B = m > 0 ? read_matrix(j, "B", n, m) : Mat(n, 0);
  const Vec c = j.contains("c") ? read_vector(j, "c", n) : Vec::Zero(n);

  OcpDefinition ocp = make_ocp(name, static_cast<int>(n), static_cast<int>(m), t0, tf);
  ocp.f = [A, B, c](const Vec& x, const Vec& u) { return (A * x + B * u + c).eval(); };
  ocp.f_x = [A](const Vec&, const Vec&) { return A; };
  ocp.f_u = [B](const Vec&, const Vec&) { return B; };
  ocp.f_hess = [n, m](const Vec&, const Vec&, const Vec&) { return Mat::Zero(n + m, n + m).eval(); };

  if (j.contains("S")) {
    const Mat S = read_matrix(j, "S", n, n);
    const Vec target = j.contains("target") ? read_vector(j, "target", n) : Vec::Zero(n);
    ocp.E = [S, target](const Vec&, const Vec& xb) {
      const Vec d = xb - target;
      return 0.5 * d.dot(S * d);
    };
    ocp.E_grad = [S, target, n](const Vec&, const Vec& xb) {
      Vec g = Vec::Zero(2 * n);
      g.tail(n) = 0.5 * (S + S.transpose()) * (xb - target);
      return g;
    };
    ocp.E_hess = [S, n](const Vec&, const Vec&) {
      Mat H = Mat::Zero(2 * n, 2 * n);
      H.bottomRightCorner(n, n) = 0.5 * (S + S.transpose());
      return H;
    };
  }

  for (const char* key : {"initial", "final"}) {
    if (!j.contains(key)) continue;
    const json& v = j.at(key);
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
      bad(std::string("'") + key + "' must have " + std::to_string(n) + " entries (null = free)");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& e = v[static_cast<std::size_t>(i)];
      if (e.is_null()) continue;
      if (std::string(key) == "initial") fix_initial_state(ocp, static_cast<int>(i), e.get<double>());
      else fix_final_state(ocp, static_cast<int>(i), e.get<double>());
    }
  }

  const bool has_running = j.contains("Q") || j.contains("R");
  BenchmarkProblem p;
  p.name = name;
  if (!has_running) {
    p.original = ocp;
    p.mayer = std::move(ocp);
    return p;
  }
  const Mat Q = j.contains("Q") ? read_matrix(j, "Q", n, n) : Mat::Zero(n, n);
  const Mat R = j.contains("R") ? read_matrix(j, "R", m, m) : Mat::Zero(m, m);
  const Mat Qs = 0.5 * (Q + Q.transpose());
  const Mat Rs = 0.5 * (R + R.transpose());
  RunningCost L;
  L.L = [Qs, Rs](const Vec& x, const Vec& u) { return 0.5 * x.dot(Qs * x) + 0.5 * u.dot(Rs * u); };
  L.grad = [Qs, Rs, n, m](const Vec& x, const Vec& u) {
    Vec g(n + m);
    g << Qs * x, Rs * u;
    return g;
  };
  L.hess = [Qs, Rs, n, m](const Vec&, const Vec&) {
    Mat H = Mat::Zero(n + m, n + m);
    H.topLeftCorner(n, n) = Qs;
    H.bottomRightCorner(m, m) = Rs;
    return H;
  };
  p.mayer = augment_running_cost(ocp, L);
  p.mayer.name = name;
  p.original = std::move(ocp);
  p.running = std::move(L);
  return p;
}

}  // namespace

BenchmarkProblem load_problem_json(std::string_view text) {
  try {
    return parse(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("problem JSON: ") + e.what());
  }
}

BenchmarkProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open problem file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_problem_json(buffer.str());
}

}  // namespace birkhoff
