#include "ocdual/lqr.hpp"

#include <chrono>
#include <vector>

#include "ocdual/coercivity.hpp"
#include "ocdual/functional.hpp"

namespace ocdual {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_lqr(const QqrProblem& pb, const char* who) {
  if (!pb.is_lqr()) {
    throw NotApplicableError(std::string(who) +
                             ": requires F = 0 (use the qqr solver)");
  }
}

// One local column of the element stiffness: either a list of weighted free
// dofs (the eliminated gamma_K column fans out through G) or a fixed value
// (the lambda_0 column).
struct LocalCol {
  std::vector<std::pair<int, double>> dofs;
  double fixed_value = 0.0;
  bool is_fixed = false;
};

std::vector<LocalCol> local_columns(const RitzBasis& basis,
                                    const QqrProblem& pb, int e) {
  const int n = pb.n, m = pb.m;
  const int K = basis.grid().num_elements();
  std::vector<LocalCol> cols;
  cols.reserve(4 * n + m);
  for (int c = 0; c < n; ++c) {  // gamma_e
    cols.push_back({{{basis.gamma_dof(e, c), 1.0}}, 0.0, false});
  }
  for (int c = 0; c < n; ++c) {  // gamma_{e+1}
    if (e + 1 <= K - 1) {
      cols.push_back({{{basis.gamma_dof(e + 1, c), 1.0}}, 0.0, false});
    } else {
      LocalCol col;  // gamma_K = G lambda_K
      for (int j = 0; j < n; ++j) {
        if (pb.G(c, j) != 0.0) {
          col.dofs.push_back({basis.lambda_dof(K, j), pb.G(c, j)});
        }
      }
      cols.push_back(col);
    }
  }
  for (int c = 0; c < n; ++c) {  // lambda_e
    if (e >= 1) {
      cols.push_back({{{basis.lambda_dof(e, c), 1.0}}, 0.0, false});
    } else {
      cols.push_back({{}, pb.lambda0[c], true});
    }
  }
  for (int c = 0; c < n; ++c) {  // lambda_{e+1}
    cols.push_back({{{basis.lambda_dof(e + 1, c), 1.0}}, 0.0, false});
  }
  for (int c = 0; c < m; ++c) {  // mu_e
    cols.push_back({{{basis.mu_dof(e, c), 1.0}}, 0.0, false});
  }
  return cols;
}

struct ElementContribution {
  Mat local;   // (4n+m) x (4n+m)
  Vec load;    // 4n+m
};

ElementContribution element_matrices(const QqrProblem& pb,
                                     const TimeGrid& grid, int e,
                                     bool with_load) {
  const int n = pb.n, m = pb.m;
  const int width = 4 * n + m;
  Mat X(n, width), P(n, width), U(m, width), GammaVal(n, width);
  ElementContribution out;
  out.local = Mat::Zero(width, width);
  out.load = Vec::Zero(width);
  const double h = grid.element_length(e);
  const Mat In = Mat::Identity(n, n);
  for (int q = 0; q < TimeGrid::kQuadOrder; ++q) {
    const double t = grid.quad_point(e, q);
    const double w = grid.quad_weight(e, q);
    const double vl = (grid.node(e + 1) - t) / h;
    const double vr = (t - grid.node(e)) / h;
    const double sl = -1.0 / h, sr = 1.0 / h;
    X.setZero();
    P.setZero();
    U.setZero();
    // script_x = gamma_dot + M^T gamma + B^T lambda
    X.block(0, 0, n, n) = sl * In + vl * pb.M.transpose();
    X.block(0, n, n, n) = sr * In + vr * pb.M.transpose();
    X.block(0, 2 * n, n, n) = vl * pb.B.transpose();
    X.block(0, 3 * n, n, n) = vr * pb.B.transpose();
    // script_p = lambda_dot - M lambda - N mu
    P.block(0, 2 * n, n, n) = sl * In - vl * pb.M;
    P.block(0, 3 * n, n, n) = sr * In - vr * pb.M;
    P.block(0, 4 * n, n, m) = -pb.N;
    // script_u = N^T gamma + C mu
    U.block(0, 0, m, n) = vl * pb.N.transpose();
    U.block(0, n, m, n) = vr * pb.N.transpose();
    U.block(0, 4 * n, m, m) = pb.C;

    out.local += w * (X.transpose() * X / pb.a_x + P.transpose() * P / pb.a_p +
                      U.transpose() * U / pb.a_u);
    if (with_load) {
      Vec fl = Vec::Zero(width);
      if (!pb.base.is_zero()) {
        fl += X.transpose() * pb.base.x(t) + P.transpose() * pb.base.p(t) +
              U.transpose() * pb.base.u(t);
      }
      if (!pb.A.is_zero()) {
        GammaVal.setZero();
        GammaVal.block(0, 0, n, n) = vl * In;
        GammaVal.block(0, n, n, n) = vr * In;
        fl += GammaVal.transpose() * pb.A(t);
      }
      out.load += w * fl;
    }
  }
  return out;
}

void scatter(const std::vector<LocalCol>& cols, const ElementContribution& ec,
             bool with_matrix, Mat* matrix, Vec* load) {
  const int width = static_cast<int>(cols.size());
  for (int a = 0; a < width; ++a) {
    if (cols[a].is_fixed) continue;
    for (const auto& [ga, wa] : cols[a].dofs) {
      if (load) (*load)[ga] += wa * ec.load[a];
      for (int b = 0; b < width; ++b) {
        if (cols[b].is_fixed) {
          if (load && cols[b].fixed_value != 0.0) {
            (*load)[ga] -= wa * ec.local(a, b) * cols[b].fixed_value;
          }
        } else if (with_matrix) {
          for (const auto& [gb, wb] : cols[b].dofs) {
            (*matrix)(ga, gb) += wa * wb * ec.local(a, b);
          }
        }
      }
    }
  }
}

}  // namespace

Mat assemble_bilinear(const QqrProblem& pb, const RitzBasis& basis,
                      int num_threads) {
  require_lqr(pb, "assemble_bilinear");
  const TimeGrid& grid = basis.grid();
  const int K = grid.num_elements();
  std::vector<ElementContribution> pieces(K);
  quadrature_map_reduce<int>(
      grid, num_threads,
      [&](int e) {
        pieces[e] = element_matrices(pb, grid, e, /*with_load=*/false);
        return 0;
      },
      0, [](int, int) { return 0; });
  Mat matrix = Mat::Zero(basis.num_free_dofs(), basis.num_free_dofs());
  for (int e = 0; e < K; ++e) {
    scatter(local_columns(basis, pb, e), pieces[e], true, &matrix, nullptr);
  }
  return matrix;
}

Vec assemble_load(const QqrProblem& pb, const RitzBasis& basis,
                  int num_threads) {
  require_lqr(pb, "assemble_load");
  const TimeGrid& grid = basis.grid();
  const int K = grid.num_elements();
  std::vector<ElementContribution> pieces(K);
  quadrature_map_reduce<int>(
      grid, num_threads,
      [&](int e) {
        pieces[e] = element_matrices(pb, grid, e, /*with_load=*/true);
        return 0;
      },
      0, [](int, int) { return 0; });
  Vec load = Vec::Zero(basis.num_free_dofs());
  for (int e = 0; e < K; ++e) {
    scatter(local_columns(basis, pb, e), pieces[e], false, nullptr, &load);
  }
  // Boundary pairing gamma(0) . x0.
  for (int c = 0; c < pb.n; ++c) {
    load[basis.gamma_dof(0, c)] += pb.x0[c];
  }
  return load;
}

LqrSystem assemble_lqr_system(const QqrProblem& pb, const RitzBasis& basis,
                              int num_threads) {
  return {assemble_bilinear(pb, basis, num_threads),
          assemble_load(pb, basis, num_threads)};
}

LqrFactorization::LqrFactorization(const QqrProblem& pb,
                                   const RitzBasis& basis, int num_threads) {
  auto t0 = Clock::now();
  matrix_ = assemble_bilinear(pb, basis, num_threads);
  assembly_seconds_ = seconds_since(t0);
  t0 = Clock::now();
  svd_.compute(matrix_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  factorization_seconds_ = seconds_since(t0);
  sv_max_ = svd_.singularValues().size() ? svd_.singularValues()[0] : 0.0;
  const double thresh = kSvdTruncation * sv_max_;
  rank_ = 0;
  sv_min_kept_ = sv_max_;
  for (int i = 0; i < svd_.singularValues().size(); ++i) {
    if (svd_.singularValues()[i] > thresh) {
      ++rank_;
      sv_min_kept_ = svd_.singularValues()[i];
    }
  }
  truncated_ = static_cast<int>(svd_.singularValues().size()) - rank_;
}

Vec LqrFactorization::solve(const Vec& load) const {
  const Vec& sv = svd_.singularValues();
  Vec coeffs = svd_.matrixU().transpose() * load;
  const double thresh = kSvdTruncation * sv_max_;
  for (int i = 0; i < sv.size(); ++i) {
    coeffs[i] = sv[i] > thresh ? coeffs[i] / sv[i] : 0.0;
  }
  return svd_.matrixV() * coeffs;
}

namespace {

LqrSolution finish_solve(const QqrProblem& pb, const RitzBasis& basis,
                         const LqrFactorization& facto, int num_threads,
                         double assembly_s, double facto_s) {
  auto t0 = Clock::now();
  Vec load = assemble_load(pb, basis, num_threads);
  Vec coeffs = facto.solve(load);

  LqrSolution sol;
  sol.dual = basis.field_from_coeffs(coeffs);
  sol.primal = recover_primal(pb, sol.dual);

  SolveReport& rep = sol.report;
  rep.solver = "lqr-galerkin";
  rep.grid_elements = basis.grid().num_elements();
  FunctionalValue fv = eval_s_tilde(pb, basis, sol.dual, num_threads);
  rep.functional_value = fv.value;
  rep.finite = fv.finite;
  rep.gradient_norm = eval_gradient(pb, basis, sol.dual, num_threads).norm();
  rep.system_residual = (facto.matrix() * coeffs - load).norm();
  rep.rank = facto.rank();
  rep.truncated_singular_values = facto.truncated();
  rep.sv_max = facto.sv_max();
  rep.sv_min_kept = facto.sv_min_kept();
  rep.primal_residuals = residual_primal(sol.primal, pb);
  rep.assembly_seconds = assembly_s;
  rep.factorization_seconds = facto_s;
  rep.solve_seconds = seconds_since(t0);
  try {
    CoercivityReport cr = check_invertibility(pb, basis.grid());
    rep.invert_margin_plus = cr.invert_margin_plus;
    rep.invert_margin_minus = cr.invert_margin_minus;
    rep.margin_warning =
        cr.invert_margin_plus < 1e-6 || cr.invert_margin_minus < 1e-6;
  } catch (const NotApplicableError&) {
    // Margins stay unset; the dual solve itself needs no invertible C.
  }
  return sol;
}

}  // namespace

LqrSolution solve_lqr(const QqrProblem& pb, const RitzBasis& basis,
                      int num_threads) {
  require_lqr(pb, "solve_lqr");
  LqrFactorization facto(pb, basis, num_threads);
  return finish_solve(pb, basis, facto, num_threads, facto.assembly_seconds(),
                      facto.factorization_seconds());
}

LqrSolution solve_lqr_cached(const QqrProblem& pb, const RitzBasis& basis,
                             const LqrFactorization& facto, int num_threads) {
  require_lqr(pb, "solve_lqr_cached");
  return finish_solve(pb, basis, facto, num_threads, 0.0, 0.0);
}

}  // namespace ocdual
