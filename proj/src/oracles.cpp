#include "ocdual/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ocdual/coercivity.hpp"
#include "ocdual/dtp.hpp"

namespace ocdual {
namespace {

// Fine oracle step count: at least kOracleSteps and at least 4x finer than
// the dual grid, so agreement with the dual solve is evidence rather than a
// shared-discretization artifact.
int fine_steps(const TimeGrid& grid) {
  return std::max(kOracleSteps, 4 * grid.num_elements());
}

Mat pinv_psd(const Mat& S, double rel_tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double thresh = rel_tol * es.eigenvalues().cwiseAbs().maxCoeff();
  Mat out = Mat::Zero(S.rows(), S.cols());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i]) > thresh) {
      out += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() /
             es.eigenvalues()[i];
    }
  }
  return out;
}

bool c_invertible(const Mat& C) {
  Eigen::SelfAdjointEigenSolver<Mat> es(C);
  double lo = es.eigenvalues().cwiseAbs().minCoeff();
  double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  return hi > 0.0 && lo > 1e-12 * hi;
}

// Cubic Hermite evaluation of a fine uniform-grid trajectory with known
// derivatives at the nodes; O(h^4), so oracle samples keep RK4 accuracy at
// arbitrary requested times.
Vec hermite_sample(const std::vector<Vec>& values,
                   const std::vector<Vec>& derivs, double h, double t) {
  const int nf = static_cast<int>(values.size()) - 1;
  int i = std::clamp(static_cast<int>(std::floor(t / h)), 0, nf - 1);
  double s = (t - i * h) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * values[i] + h10 * h * derivs[i] + h01 * values[i + 1] +
         h11 * h * derivs[i + 1];
}

}  // namespace

Mat RiccatiSolution::k_at(double t) const {
  if (t <= k_times.front()) return k_matrices.front();
  if (t >= k_times.back()) return k_matrices.back();
  auto it = std::upper_bound(k_times.begin(), k_times.end(), t);
  int i = static_cast<int>(it - k_times.begin()) - 1;
  double w = (t - k_times[i]) / (k_times[i + 1] - k_times[i]);
  return (1.0 - w) * k_matrices[i] + w * k_matrices[i + 1];
}

RiccatiSolution solve_riccati(const QqrProblem& pb, const TimeGrid& grid) {
  if (!pb.is_lqr()) {
    throw NotApplicableError("riccati: requires F = 0");
  }
  if (!pb.A.is_zero()) {
    throw NotApplicableError("riccati: requires zero forcing");
  }
  if (!c_invertible(pb.C)) {
    throw NotApplicableError("riccati: requires invertible C");
  }
  const int n = pb.n;
  const double T = pb.T;
  const Mat Cinv = pb.C.inverse();
  const Mat S = pb.N * Cinv * pb.N.transpose();

  auto kdot = [&](const Mat& K) -> Mat {
    return pb.B - K * pb.M - pb.M.transpose() * K - K * S * K;
  };

  // Backward RK4 at half steps so the forward pass has exact stage values.
  const int nf = fine_steps(grid);
  const int half = 2 * nf;
  const double hh = T / half;
  RiccatiSolution sol;
  sol.k_times.resize(half + 1);
  sol.k_matrices.resize(half + 1);
  Mat K = -pb.G;
  sol.k_times[half] = T;
  sol.k_matrices[half] = K;
  for (int i = half; i > 0; --i) {
    const double dt = -hh;
    Mat k1 = kdot(K);
    Mat k2 = kdot(K + 0.5 * dt * k1);
    Mat k3 = kdot(K + 0.5 * dt * k2);
    Mat k4 = kdot(K + dt * k3);
    K += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (K.norm() > 1e12) {
      throw FiniteEscapeError("riccati: K blow-up during backward sweep");
    }
    sol.k_times[i - 1] = T * static_cast<double>(i - 1) / half;
    sol.k_matrices[i - 1] = K;
  }

  // Forward sweep for the state under feedback.
  const double h = T / nf;
  std::vector<Vec> xs(nf + 1), dxs(nf + 1);
  xs[0] = pb.x0;
  auto xdot = [&](int half_index, const Vec& x) -> Vec {
    return (pb.M + S * sol.k_matrices[half_index]) * x;
  };
  for (int i = 0; i < nf; ++i) {
    Vec k1 = xdot(2 * i, xs[i]);
    Vec k2 = xdot(2 * i + 1, xs[i] + 0.5 * h * k1);
    Vec k3 = xdot(2 * i + 1, xs[i] + 0.5 * h * k2);
    Vec k4 = xdot(2 * i + 2, xs[i] + h * k3);
    dxs[i] = k1;
    xs[i + 1] = xs[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  dxs[nf] = xdot(half, xs[nf]);

  std::vector<double> ts = sample_times(grid);
  PrimalTriple& tr = sol.trajectory;
  tr.t = ts;
  tr.x = Mat::Zero(ts.size(), n);
  tr.u = Mat::Zero(ts.size(), pb.m);
  tr.p = Mat::Zero(ts.size(), n);
  for (size_t r = 0; r < ts.size(); ++r) {
    Vec x = hermite_sample(xs, dxs, h, ts[r]);
    Vec p = sol.k_at(ts[r]) * x;
    tr.x.row(r) = x.transpose();
    tr.p.row(r) = p.transpose();
    tr.u.row(r) = (Cinv * pb.N.transpose() * p).transpose();
  }
  return sol;
}

namespace {

struct PrimalRhs {
  const QqrProblem& pb;
  Mat c_pinv;

  Vec control(const Vec& p) const { return c_pinv * pb.N.transpose() * p; }

  void eval(double t, const Vec& x, const Vec& p, Vec& dx, Vec& dp) const {
    Vec u = control(p);
    dx = pb.dynamics_rhs(t, x, u);
    dp = pb.B * x - pb.M.transpose() * p;
    if (!pb.F.empty()) dp -= pb.costate_coupling(p, x);
  }
};

// One RK4 sweep; fills x, p and their RHS derivatives at every fine node.
void integrate_primal(const PrimalRhs& rhs, const QqrProblem& pb, int nf,
                      const Vec& p0, std::vector<Vec>& xs, std::vector<Vec>& ps,
                      std::vector<Vec>& dxs, std::vector<Vec>& dps) {
  const double h = pb.T / nf;
  xs.assign(nf + 1, Vec());
  ps.assign(nf + 1, Vec());
  dxs.assign(nf + 1, Vec());
  dps.assign(nf + 1, Vec());
  xs[0] = pb.x0;
  ps[0] = p0;
  Vec dx1, dp1, dx2, dp2, dx3, dp3, dx4, dp4;
  for (int i = 0; i < nf; ++i) {
    double t = i * h;
    rhs.eval(t, xs[i], ps[i], dx1, dp1);
    rhs.eval(t + 0.5 * h, xs[i] + 0.5 * h * dx1, ps[i] + 0.5 * h * dp1, dx2,
             dp2);
    rhs.eval(t + 0.5 * h, xs[i] + 0.5 * h * dx2, ps[i] + 0.5 * h * dp2, dx3,
             dp3);
    rhs.eval(t + h, xs[i] + h * dx3, ps[i] + h * dp3, dx4, dp4);
    dxs[i] = dx1;
    dps[i] = dp1;
    xs[i + 1] = xs[i] + h / 6.0 * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
    ps[i + 1] = ps[i] + h / 6.0 * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4);
  }
  rhs.eval(pb.T, xs[nf], ps[nf], dxs[nf], dps[nf]);
}

}  // namespace

ShootingResult solve_shooting(const QqrProblem& pb, const TimeGrid& grid) {
  // u = C⁺Nᵀp; valid for invertible C and under the weakened kernel/image
  // condition (the gauge component of u affects neither dynamics nor cost).
  PrimalRhs rhs{pb, pinv_psd(pb.C)};
  const int nf = fine_steps(grid);
  const int n = pb.n;

  std::vector<Vec> xs, ps, dxs, dps;
  auto terminal_residual = [&](const Vec& p0) -> Vec {
    integrate_primal(rhs, pb, nf, p0, xs, ps, dxs, dps);
    return ps[nf] + pb.G * xs[nf];
  };

  ShootingResult result;
  Vec p0 = Vec::Zero(n);
  Vec r = terminal_residual(p0);
  const double tol = 1e-10 * (1.0 + pb.x0.norm());
  int it = 0;
  for (; it < 50 && r.norm() > tol; ++it) {
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
      double eps = 1e-6 * (1.0 + std::abs(p0[j]));
      Vec p0j = p0;
      p0j[j] += eps;
      J.col(j) = (terminal_residual(p0j) - r) / eps;
    }
    Vec step = J.fullPivLu().solve(-r);
    // Damped update in case the quadratic coupling makes a full step overshoot.
    double alpha = 1.0;
    Vec r_new = r;
    for (int back = 0; back < 30; ++back) {
      r_new = terminal_residual(p0 + alpha * step);
      if (r_new.norm() < r.norm() || r_new.norm() <= tol) break;
      alpha *= 0.5;
    }
    p0 += alpha * step;
    r = r_new;
  }
  result.newton_iterations = it;
  result.terminal_residual = r.norm();
  result.converged = r.norm() <= std::max(tol, 1e-8);
  integrate_primal(rhs, pb, nf, p0, xs, ps, dxs, dps);

  const double h = pb.T / nf;
  std::vector<double> ts = sample_times(grid);
  PrimalTriple& tr = result.trajectory;
  tr.t = ts;
  tr.x = Mat::Zero(ts.size(), n);
  tr.u = Mat::Zero(ts.size(), pb.m);
  tr.p = Mat::Zero(ts.size(), n);
  tr.x_dot = Mat::Zero(ts.size(), n);
  tr.p_dot = Mat::Zero(ts.size(), n);
  Vec dx(n), dp(n);
  for (size_t i = 0; i < ts.size(); ++i) {
    Vec x = hermite_sample(xs, dxs, h, ts[i]);
    Vec p = hermite_sample(ps, dps, h, ts[i]);
    rhs.eval(ts[i], x, p, dx, dp);
    tr.x.row(i) = x.transpose();
    tr.p.row(i) = p.transpose();
    tr.u.row(i) = rhs.control(p).transpose();
    tr.x_dot->row(i) = dx.transpose();
    tr.p_dot->row(i) = dp.transpose();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Closed-form example solution.

namespace {

constexpr double kS2 = 1.4142135623730951;  // sqrt(2)

template <typename S>
struct ExampleEval {
  double x0, l0, T;

  double denom() const {
    double E = std::exp(2 * kS2 * T);
    return ((kS2 - 2) * E - kS2 - 2) *
           (-2 * E + (2 * kS2 - 3) * E * E - 2 * kS2 - 3);
  }

  S x(S t) const {
    using std::exp;
    S num = exp(-kS2 * t) * (-x0) *
            (-(kS2 - 2) * exp(2 * kS2 * (t + 2 * T)) +
             2 * (kS2 + 2) * exp(2 * kS2 * (t + T)) +
             (7 * kS2 + 10) * exp(2 * kS2 * t) -
             2 * (kS2 - 2) * std::exp(4 * kS2 * T) +
             (kS2 + 2) * std::exp(2 * kS2 * T) +
             (10 - 7 * kS2) * std::exp(6 * kS2 * T));
    return num / denom();
  }

  S u(S t) const {
    using std::exp;
    double E = std::exp(2 * kS2 * T);
    S num = exp(-kS2 * t) * (-x0) *
            (2 * kS2 * E + (3 * kS2 - 4) * E * E + 3 * kS2 + 4) *
            (exp(2 * kS2 * t) - E);
    return num / denom();
  }

  S p(S t) const { return 2.0 * u(t); }

  S lambda(S t) const {
    using std::exp;
    double E = std::exp(2 * kS2 * T);
    double E2 = E * E, E3 = E2 * E;
    S e2t = exp(2 * kS2 * t);
    S num =
        exp(-kS2 * t) *
        (E3 * ((10 - 7 * kS2) * l0 + (7 - 5 * kS2) * x0 * t) +
         e2t * ((7 * kS2 + 10) * l0 + (5 * kS2 + 7) * x0 * t) -
         2 * E2 * ((kS2 - 2) * l0 + (kS2 - 1) * x0 * (t - T - 1)) +
         2 * e2t * E * ((kS2 + 2) * l0 + (kS2 + 1) * x0 * (t - T - 1)) +
         e2t * E2 * ((kS2 - 1) * x0 * (t - 2 * (T + 1)) - (kS2 - 2) * l0) +
         E * ((kS2 + 2) * l0 - (kS2 + 1) * x0 * (t - 2 * (T + 1))));
    return num / denom();
  }

  S mu(S t) const {
    using std::exp;
    double E = std::exp(2 * kS2 * T);
    double E2 = E * E, E3 = E2 * E;
    S e2t = exp(2 * kS2 * t);
    S num =
        exp(-kS2 * t) *
        (E3 * ((3 * kS2 - 4) * l0 + (2 * kS2 - 3) * x0 * t +
               (1 - kS2) * x0) +
         e2t * (x0 * (kS2 + 1 - (2 * kS2 + 3) * t) - (3 * kS2 + 4) * l0) +
         2 * E2 * (kS2 * l0 - x0 * (t - T + kS2)) -
         2 * e2t * E * (kS2 * l0 - x0 * (T + kS2 - t)) +
         E * ((3 * kS2 + 4) * l0 -
              x0 * ((2 * kS2 + 3) * t - 4 * kS2 * T - 6 * T + kS2 + 1)) +
         e2t * E2 *
             ((4 - 3 * kS2) * l0 +
              x0 * ((2 * kS2 - 3) * t - 4 * kS2 * T + 6 * T + kS2 - 1)));
    return num / denom();
  }

  // The printed gamma does not satisfy the dual system; the u-stationarity
  // relation u = -(gamma - 2 mu) determines it from the verified pieces.
  S gamma(S t) const { return 2.0 * mu(t) - u(t); }
};

// Complex-step derivative: exact to roundoff for these analytic expressions.
template <typename F>
double cs_derivative(F f, double t) {
  constexpr double h = 1e-100;
  return f(std::complex<double>(t, h)).imag() / h;
}

}  // namespace

ExamplePoint example_solution(double x0, double lambda0, double T, double t) {
  if (t < 0.0 || t > T) {
    throw std::domain_error("example_solution: t outside [0, T]");
  }
  ExampleEval<double> real{x0, lambda0, T};
  ExampleEval<std::complex<double>> cplx{x0, lambda0, T};
  ExamplePoint pt;
  pt.x = real.x(t);
  pt.u = real.u(t);
  pt.p = real.p(t);
  pt.gamma = real.gamma(t);
  pt.lambda = real.lambda(t);
  pt.mu = real.mu(t);
  pt.x_dot = cs_derivative([&](std::complex<double> z) { return cplx.x(z); }, t);
  pt.u_dot = cs_derivative([&](std::complex<double> z) { return cplx.u(z); }, t);
  pt.p_dot = cs_derivative([&](std::complex<double> z) { return cplx.p(z); }, t);
  return pt;
}

QqrProblem make_example_problem(double x0, double lambda0, double T,
                                int grid_elements) {
  QqrProblem pb;
  pb.n = 1;
  pb.m = 1;
  pb.T = T;
  pb.B = Mat::Constant(1, 1, 2.0);
  pb.C = Mat::Constant(1, 1, 2.0);
  pb.G = Mat::Zero(1, 1);
  pb.M = Mat::Constant(1, 1, 1.0);
  pb.N = Mat::Constant(1, 1, 1.0);
  pb.A = VectorSignal::zero(1);
  pb.x0 = Vec::Constant(1, -x0);
  pb.lambda0 = Vec::Constant(1, lambda0);
  pb.base = BaseState::zero(1, 1);
  pb.grid_elements = grid_elements;
  pb.validate();
  return pb;
}

PrimalTriple example_primal(double x0, double T, const TimeGrid& grid) {
  std::vector<double> ts = sample_times(grid);
  PrimalTriple tr;
  tr.t = ts;
  tr.x = Mat::Zero(ts.size(), 1);
  tr.u = Mat::Zero(ts.size(), 1);
  tr.p = Mat::Zero(ts.size(), 1);
  tr.x_dot = Mat::Zero(ts.size(), 1);
  tr.p_dot = Mat::Zero(ts.size(), 1);
  for (size_t i = 0; i < ts.size(); ++i) {
    ExamplePoint pt = example_solution(x0, 0.0, T, ts[i]);
    tr.x(i, 0) = pt.x;
    tr.u(i, 0) = pt.u;
    tr.p(i, 0) = pt.p;
    (*tr.x_dot)(i, 0) = pt.x_dot;
    (*tr.p_dot)(i, 0) = pt.p_dot;
  }
  return tr;
}

DualField example_dual_field(double x0, double lambda0,
                             const RitzBasis& basis) {
  const TimeGrid& grid = basis.grid();
  const int K = grid.num_elements();
  DualField f = DualField::zero(grid, 1, 1);
  double T = grid.final_time();
  for (int j = 0; j <= K; ++j) {
    ExamplePoint pt = example_solution(x0, lambda0, T, grid.node(j));
    f.gamma(j, 0) = pt.gamma;
    f.lambda(j, 0) = pt.lambda;
  }
  for (int e = 0; e < K; ++e) {
    ExamplePoint pt =
        example_solution(x0, lambda0, T, grid.element_midpoint(e));
    // The example's mu has the opposite orientation to this library's.
    f.mu(e, 0) = -pt.mu;
  }
  return f;
}

double primal_uniqueness_check(double T) {
  Mat ham(2, 2);
  ham << 1.0, 0.5, 2.0, -1.0;
  Mat E = matrix_exponential(ham, T);
  return E(1, 1);
}

}  // namespace ocdual
