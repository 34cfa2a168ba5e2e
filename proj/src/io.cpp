#include "ocdual/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ocdual {
namespace {

using nlohmann::json;

Mat parse_matrix(const json& j, int rows, int cols, const std::string& name) {
  Mat out(rows, cols);
  if (!j.is_array()) {
    throw std::runtime_error("problem: " + name + " must be an array");
  }
  if (!j.empty() && j[0].is_array()) {  // nested rows
    if (static_cast<int>(j.size()) != rows) {
      throw std::runtime_error("problem: " + name + " row count mismatch");
    }
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(j[r].size()) != cols) {
        throw std::runtime_error("problem: " + name + " column count mismatch");
      }
      for (int c = 0; c < cols; ++c) out(r, c) = j[r][c].get<double>();
    }
    return out;
  }
  if (static_cast<int>(j.size()) != rows * cols) {  // flat row-major
    throw std::runtime_error("problem: " + name + " must have " +
                             std::to_string(rows * cols) + " entries");
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = j[r * cols + c].get<double>();
  }
  return out;
}

Vec parse_vector(const json& j, int dim, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw std::runtime_error("problem: " + name + " must have " +
                             std::to_string(dim) + " entries");
  }
  Vec out(dim);
  for (int i = 0; i < dim; ++i) out[i] = j[i].get<double>();
  return out;
}

VectorSignal parse_signal(const json& j, int dim, const std::string& name) {
  if (j.is_string()) {
    if (j.get<std::string>() == "zero") return VectorSignal::zero(dim);
    throw std::runtime_error("problem: unknown signal keyword for " + name);
  }
  if (!j.is_array() || j.empty()) {
    throw std::runtime_error("problem: bad signal encoding for " + name);
  }
  if (!j[0].is_array()) {  // constant vector
    return VectorSignal::constant(parse_vector(j, dim, name));
  }
  // table of (t, value...) rows
  std::vector<double> times;
  Mat values(j.size(), dim);
  for (size_t r = 0; r < j.size(); ++r) {
    if (static_cast<int>(j[r].size()) != dim + 1) {
      throw std::runtime_error("problem: table row width mismatch in " + name);
    }
    times.push_back(j[r][0].get<double>());
    for (int c = 0; c < dim; ++c) values(r, c) = j[r][c + 1].get<double>();
  }
  return VectorSignal::table(std::move(times), std::move(values));
}

json signal_to_json(const VectorSignal& s, double final_time) {
  if (s.is_zero()) return json("zero");
  if (s.is_constant()) {
    json j = json::array();
    Vec v = s(0.0);
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
  }
  json rows = json::array();
  if (s.is_table()) {  // exact round trip
    for (size_t r = 0; r < s.table_times().size(); ++r) {
      json row = json::array();
      row.push_back(s.table_times()[r]);
      for (int c = 0; c < s.dim(); ++c) row.push_back(s.table_values()(r, c));
      rows.push_back(row);
    }
    return rows;
  }
  // Closed-form and Hermite signals are flattened to a dense linear table.
  const int samples = 201;
  for (int i = 0; i < samples; ++i) {
    double t = final_time * i / (samples - 1);
    json row = json::array();
    row.push_back(t);
    Vec v = s(t);
    for (int c = 0; c < v.size(); ++c) row.push_back(v[c]);
    rows.push_back(row);
  }
  return rows;
}

json matrix_to_json(const Mat& m) {
  json j = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) j.push_back(m(r, c));
  }
  return j;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

QqrProblem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("problem: invalid JSON: ") + e.what());
  }
  QqrProblem pb;
  pb.n = j.at("n").get<int>();
  pb.m = j.at("m").get<int>();
  pb.T = j.at("T").get<double>();
  pb.B = parse_matrix(j.at("B"), pb.n, pb.n, "B");
  pb.C = parse_matrix(j.at("C"), pb.m, pb.m, "C");
  pb.G = j.contains("G") ? parse_matrix(j.at("G"), pb.n, pb.n, "G")
                         : Mat::Zero(pb.n, pb.n);
  pb.M = parse_matrix(j.at("M"), pb.n, pb.n, "M");
  pb.N = parse_matrix(j.at("N"), pb.n, pb.m, "N");
  if (j.contains("F") && !(j["F"].is_string() && j["F"] == "zero")) {
    const json& jf = j["F"];
    const int n = pb.n;
    if (!jf.is_array() || static_cast<int>(jf.size()) != n * n * n) {
      throw std::runtime_error("problem: F must have n^3 entries (i,r,s)");
    }
    pb.F.assign(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          pb.F[i](r, s) = jf[i * n * n + r * n + s].get<double>();
        }
      }
    }
  }
  pb.A = j.contains("A") ? parse_signal(j.at("A"), pb.n, "A")
                         : VectorSignal::zero(pb.n);
  pb.x0 = parse_vector(j.at("x0"), pb.n, "x0");
  pb.lambda0 = j.contains("lambda0")
                   ? parse_vector(j.at("lambda0"), pb.n, "lambda0")
                   : Vec::Zero(pb.n);
  pb.a_x = j.value("a_x", 1.0);
  pb.a_u = j.value("a_u", 1.0);
  pb.a_p = j.value("a_p", 1.0);
  pb.base = BaseState::zero(pb.n, pb.m);
  if (j.contains("base")) {
    const json& jb = j["base"];
    if (jb.contains("x")) pb.base.x = parse_signal(jb["x"], pb.n, "base.x");
    if (jb.contains("u")) pb.base.u = parse_signal(jb["u"], pb.m, "base.u");
    if (jb.contains("p")) pb.base.p = parse_signal(jb["p"], pb.n, "base.p");
  }
  if (j.contains("grid")) {
    const json& jg = j["grid"];
    if (jg.contains("nodes")) {
      pb.grid_nodes = jg["nodes"].get<std::vector<double>>();
      pb.grid_elements = static_cast<int>(pb.grid_nodes->size()) - 1;
    } else if (jg.contains("elements")) {
      pb.grid_elements = jg["elements"].get<int>();
    }
  }
  try {
    pb.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("problem: ") + e.what());
  }
  return pb;
}

QqrProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open problem file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string problem_to_json(const QqrProblem& pb) {
  json j;
  j["n"] = pb.n;
  j["m"] = pb.m;
  j["T"] = pb.T;
  j["B"] = matrix_to_json(pb.B);
  j["C"] = matrix_to_json(pb.C);
  j["G"] = matrix_to_json(pb.G);
  j["M"] = matrix_to_json(pb.M);
  j["N"] = matrix_to_json(pb.N);
  if (!pb.is_lqr()) {
    json jf = json::array();
    for (int i = 0; i < pb.n; ++i) {
      for (int r = 0; r < pb.n; ++r) {
        for (int s = 0; s < pb.n; ++s) jf.push_back(pb.F[i](r, s));
      }
    }
    j["F"] = jf;
  }
  j["A"] = signal_to_json(pb.A, pb.T);
  j["x0"] = std::vector<double>(pb.x0.begin(), pb.x0.end());
  j["lambda0"] = std::vector<double>(pb.lambda0.begin(), pb.lambda0.end());
  j["a_x"] = pb.a_x;
  j["a_u"] = pb.a_u;
  j["a_p"] = pb.a_p;
  if (!pb.base.is_zero()) {
    j["base"] = {{"x", signal_to_json(pb.base.x, pb.T)},
                 {"u", signal_to_json(pb.base.u, pb.T)},
                 {"p", signal_to_json(pb.base.p, pb.T)}};
  }
  if (pb.grid_nodes) {
    j["grid"] = {{"nodes", *pb.grid_nodes}};
  } else {
    j["grid"] = {{"elements", pb.grid_elements}};
  }
  return j.dump(2);
}

void write_trajectory_csv(const std::string& path, const PrimalTriple& tr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  const int n = static_cast<int>(tr.x.cols());
  const int m = static_cast<int>(tr.u.cols());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int i = 1; i <= m; ++i) out << ",u_" << i;
  for (int i = 1; i <= n; ++i) out << ",p_" << i;
  out << "\n";
  for (int r = 0; r < tr.size(); ++r) {
    out << format_double(tr.t[r]);
    for (int i = 0; i < n; ++i) out << "," << format_double(tr.x(r, i));
    for (int i = 0; i < m; ++i) out << "," << format_double(tr.u(r, i));
    for (int i = 0; i < n; ++i) out << "," << format_double(tr.p(r, i));
    out << "\n";
  }
}

PrimalTriple read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("empty trajectory file: " + path);
  }
  int n = 0, m = 0;
  {
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col.rfind("x_", 0) == 0) ++n;
      if (col.rfind("u_", 0) == 0) ++m;
    }
  }
  if (n == 0) throw std::runtime_error("trajectory header missing x columns");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != 1 + 2 * n + m) {
      throw std::runtime_error("trajectory row width mismatch");
    }
    rows.push_back(std::move(row));
  }
  PrimalTriple tr;
  tr.t.resize(rows.size());
  tr.x = Mat::Zero(rows.size(), n);
  tr.u = Mat::Zero(rows.size(), m);
  tr.p = Mat::Zero(rows.size(), n);
  for (size_t r = 0; r < rows.size(); ++r) {
    tr.t[r] = rows[r][0];
    for (int i = 0; i < n; ++i) tr.x(r, i) = rows[r][1 + i];
    for (int i = 0; i < m; ++i) tr.u(r, i) = rows[r][1 + n + i];
    for (int i = 0; i < n; ++i) tr.p(r, i) = rows[r][1 + n + m + i];
  }
  return tr;
}

std::string report_to_json(const SolveReport& rep) {
  json j;
  j["solver"] = rep.solver;
  j["grid_elements"] = rep.grid_elements;
  j["functional_value"] = rep.functional_value;
  j["finite"] = rep.finite;
  j["gradient_norm"] = rep.gradient_norm;
  j["residuals"] = {{"state_l2", rep.primal_residuals.state_l2},
                    {"state_max", rep.primal_residuals.state_max},
                    {"costate_l2", rep.primal_residuals.costate_l2},
                    {"costate_max", rep.primal_residuals.costate_max},
                    {"control_l2", rep.primal_residuals.control_l2},
                    {"control_max", rep.primal_residuals.control_max},
                    {"terminal", rep.primal_residuals.terminal},
                    {"initial", rep.primal_residuals.initial}};
  j["system_residual"] = rep.system_residual;
  j["rank"] = rep.rank;
  j["truncated_singular_values"] = rep.truncated_singular_values;
  j["sv_max"] = rep.sv_max;
  j["sv_min_kept"] = rep.sv_min_kept;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["value_trace"] = rep.value_trace;
  j["gradient_trace"] = rep.gradient_trace;
  if (rep.invert_margin_plus) {
    j["invert_margin_plus"] = *rep.invert_margin_plus;
    j["invert_margin_minus"] = *rep.invert_margin_minus;
    j["margin_warning"] = rep.margin_warning;
  }
  j["timings"] = {{"assembly_seconds", rep.assembly_seconds},
                  {"factorization_seconds", rep.factorization_seconds},
                  {"solve_seconds", rep.solve_seconds}};
  return j.dump(2);
}

std::string coercivity_to_json(const CoercivityReport& rep) {
  json j;
  auto dense = [](const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  j["R"] = dense(rep.R);
  j["exp_TR"] = dense(rep.exp_TR);
  j["invert_margin_plus"] = rep.invert_margin_plus;
  j["invert_margin_minus"] = rep.invert_margin_minus;
  j["data_size"] = rep.data_size;
  j["c_invertible"] = rep.c_invertible;
  j["c_applicable"] = rep.c_applicable;
  j["margin_warning"] =
      rep.invert_margin_plus < 1e-6 || rep.invert_margin_minus < 1e-6;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << text;
}

}  // namespace ocdual
