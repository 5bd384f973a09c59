#include "driftlab/tw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "driftlab/asym.hpp"

namespace driftlab::tw {

// ---------------------------------------------------------------------------
// Grid / profile basics
// ---------------------------------------------------------------------------

Grid Grid::make(double L, int ell_g) {
  Grid g;
  g.ell_g = ell_g;
  int N = static_cast<int>(std::lround(L * ell_g));
  if (N % 2 != 0) ++N;
  g.N = N;
  g.h = 1.0 / ell_g;
  g.L = static_cast<double>(N) / ell_g;
  g.validate();
  return g;
}

void Grid::validate() const {
  if (ell_g < 4) throw GridError("grid requires ell_g >= 4");
  if (ell_g % 2 == 0)
    throw GridError(
        "grid requires odd ell_g: with an even points-per-unit count the "
        "Nyquist mode lies in the kernel of the +-1, +-2 delay stencil and "
        "the Newton system is singular");
  if (N <= 0 || !(L > 0.0)) throw GridError("grid requires positive L and N");
  if (N % 2 != 0) throw GridError("grid requires even N");
  if (std::abs(h - 1.0 / ell_g) > 1e-15 ||
      std::abs(L - static_cast<double>(N) / ell_g) > 1e-12)
    throw GridError("grid metadata inconsistent (h = 1/ell_g = L/N)");
}

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::TotalMass: return "total-mass";
    case Normalization::PartyMass: return "party-mass";
    case Normalization::BackgroundMass: return "background-mass";
  }
  throw DomainError("unknown normalization");
}

Normalization normalization_from_name(const std::string& s) {
  if (s == "total-mass") return Normalization::TotalMass;
  if (s == "party-mass") return Normalization::PartyMass;
  if (s == "background-mass") return Normalization::BackgroundMass;
  throw ConfigError("unknown normalization: " + s);
}

void WaveProfile::validate() const {
  grid.validate();
  if (q.size() != grid.N) throw GridError("profile size does not match grid");
  if (!(m > 0.0)) throw DomainError("profile requires m > 0");
  if (beta < 0.0) throw DomainError("profile requires beta >= 0");
}

namespace {

// far-field band: fixed by the grid coordinate (profiles are kept centered),
// so the mass-constraint row stays linear in q
bool in_band(const Grid& g, int i) { return std::abs(g.xi(i)) >= 0.45 * g.L; }

int band_count(const Grid& g) {
  int nb = 0;
  for (int i = 0; i < g.N; ++i)
    if (in_band(g, i)) ++nb;
  return nb;
}

}  // namespace

double WaveProfile::far_field() const {
  double s = 0.0;
  int nb = 0;
  for (int i = 0; i < grid.N; ++i) {
    if (in_band(grid, i)) {
      s += q[i];
      ++nb;
    }
  }
  return nb > 0 ? s / nb : 0.0;
}

double WaveProfile::centroid() const {
  // circular mean of |q - far| weights around the argmax node
  const int N = grid.N;
  double far = far_field();
  int ipk = 0;
  double best = -1.0;
  for (int i = 0; i < N; ++i) {
    double w = std::abs(q[i] - far);
    if (w > best) {
      best = w;
      ipk = i;
    }
  }
  double ws = 0.0, wd = 0.0;
  for (int i = 0; i < N; ++i) {
    double w = std::abs(q[i] - far);
    int d = i - ipk;
    if (d > N / 2) d -= N;
    if (d < -N / 2) d += N;
    ws += w;
    wd += w * d;
  }
  double node = ipk + (ws > 0.0 ? wd / ws : 0.0);
  double x = -0.5 * grid.L + grid.h * node;
  if (x >= 0.5 * grid.L) x -= grid.L;
  if (x < -0.5 * grid.L) x += grid.L;
  return x;
}

// ---------------------------------------------------------------------------
// Residual
// ---------------------------------------------------------------------------

namespace {

inline int wrap(int i, int N) {
  i %= N;
  return i < 0 ? i + N : i;
}

double mass_row_value(const WaveProfile& p) {
  const Grid& g = p.grid;
  double sum_qh = p.q.sum() * g.h;
  switch (p.normalization) {
    case Normalization::BackgroundMass:
      return p.far_field();
    case Normalization::TotalMass:
      return p.m * g.L + sum_qh - p.M;
    case Normalization::PartyMass:
      return sum_qh - g.L * p.far_field() - p.M;
  }
  throw DomainError("unknown normalization");
}

}  // namespace

Eigen::VectorXd residual(const WaveProfile& p) {
  p.validate();
  const Grid& g = p.grid;
  const int N = g.N, l = g.ell_g;
  const auto& q = p.q;
  Eigen::VectorXd r(N + 2);

  for (int i = 0; i < N; ++i) {
    double qm2 = q[wrap(i - 2, N)], qm1 = q[wrap(i - 1, N)];
    double qp1 = q[wrap(i + 1, N)], qp2 = q[wrap(i + 2, N)];
    double dq = (-qp2 + 8.0 * qp1 - 8.0 * qm1 + qm2) / (12.0 * g.h);
    double ql = q[wrap(i - l, N)], qr = q[wrap(i + l, N)];
    double qll = q[wrap(i - 2 * l, N)], qrr = q[wrap(i + 2 * l, N)];
    double lin = 2.0 * ql + 2.0 * (p.beta + 1.0) * (qr - q[i]) - qll - qrr;
    double nl = 2.0 * ql * qr - q[i] * (qll + qrr) +
                p.beta * (qr * qr - q[i] * q[i]);
    r[i] = -p.c * dq + p.m * lin + nl + p.mu * q[i];
  }

  double phase = 0.0;
  for (int i = 0; i < N; ++i) phase += g.xi(i) * q[i] * g.h;
  r[N] = phase;
  r[N + 1] = mass_row_value(p);
  return r;
}

// ---------------------------------------------------------------------------
// Jacobian assembly
// ---------------------------------------------------------------------------

namespace {

struct Assembled {
  // core block (FDE rows x q columns), plus dense borders:
  // columns c, mu [, beta]; rows phase, mass [, secant added by caller]
  Eigen::SparseMatrix<double> A;  // N x N
  Eigen::MatrixXd B;              // N x k
  Eigen::MatrixXd C;              // k x N
  Eigen::MatrixXd D;              // k x k
};

Assembled assemble(const WaveProfile& p, bool with_beta) {
  const Grid& g = p.grid;
  const int N = g.N, l = g.ell_g;
  const int k = with_beta ? 3 : 2;
  const auto& q = p.q;
  const double inv12h = 1.0 / (12.0 * g.h);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(N) * 9);
  Assembled out;
  // two constraint rows (phase, mass); the secant row, when continuation in
  // beta is active, is appended by the caller
  out.B = Eigen::MatrixXd::Zero(N, k);
  out.C = Eigen::MatrixXd::Zero(2, N);
  out.D = Eigen::MatrixXd::Zero(2, k);

  for (int i = 0; i < N; ++i) {
    double qm2 = q[wrap(i - 2, N)], qm1 = q[wrap(i - 1, N)];
    double qp1 = q[wrap(i + 1, N)], qp2 = q[wrap(i + 2, N)];
    double ql = q[wrap(i - l, N)], qr = q[wrap(i + l, N)];
    double qll = q[wrap(i - 2 * l, N)], qrr = q[wrap(i + 2 * l, N)];

    // derivative stencil
    trip.emplace_back(i, wrap(i - 2, N), -p.c * inv12h);
    trip.emplace_back(i, wrap(i - 1, N), 8.0 * p.c * inv12h);
    trip.emplace_back(i, wrap(i + 1, N), -8.0 * p.c * inv12h);
    trip.emplace_back(i, wrap(i + 2, N), p.c * inv12h);
    // diagonal
    trip.emplace_back(i, i,
                      -2.0 * p.m * (p.beta + 1.0) - (qll + qrr) -
                          2.0 * p.beta * q[i] + p.mu);
    // delay couplings
    trip.emplace_back(i, wrap(i + l, N),
                      2.0 * p.m * (p.beta + 1.0) + 2.0 * ql +
                          2.0 * p.beta * qr);
    trip.emplace_back(i, wrap(i - l, N), 2.0 * p.m + 2.0 * qr);
    trip.emplace_back(i, wrap(i + 2 * l, N), -p.m - q[i]);
    trip.emplace_back(i, wrap(i - 2 * l, N), -p.m - q[i]);

    double dq = (-qp2 + 8.0 * qp1 - 8.0 * qm1 + qm2) * inv12h;
    out.B(i, 0) = -dq;     // d/dc
    out.B(i, 1) = q[i];    // d/dmu
    if (with_beta)
      out.B(i, 2) = 2.0 * p.m * (qr - q[i]) + (qr * qr - q[i] * q[i]);
  }

  // phase row
  for (int i = 0; i < N; ++i) out.C(0, i) = g.xi(i) * g.h;
  // mass row
  const int nb = band_count(g);
  for (int i = 0; i < N; ++i) {
    switch (p.normalization) {
      case Normalization::BackgroundMass:
        out.C(1, i) = in_band(g, i) ? 1.0 / nb : 0.0;
        break;
      case Normalization::TotalMass:
        out.C(1, i) = g.h;
        break;
      case Normalization::PartyMass:
        out.C(1, i) = g.h - (in_band(g, i) ? g.L / nb : 0.0);
        break;
    }
  }

  out.A.resize(N, N);
  out.A.setFromTriplets(trip.begin(), trip.end());
  return out;
}

// Solve [A B; C D][x;z] = rhs by Schur complement on the border, with a
// dense-LU fallback through the full sparse matrix when A is singular, and
// one step of iterative refinement.
Eigen::VectorXd solve_assembled(const Assembled& s,
                                const Eigen::MatrixXd& extra_rows,
                                const Eigen::VectorXd& rhs) {
  const int N = static_cast<int>(s.A.rows());
  Eigen::MatrixXd C = s.C;
  Eigen::MatrixXd D = s.D;
  if (extra_rows.size() > 0) {
    const int k = static_cast<int>(s.B.cols());
    C.conservativeResize(C.rows() + extra_rows.rows(), N);
    D.conservativeResize(D.rows() + extra_rows.rows(), k);
    C.bottomRows(extra_rows.rows()) = extra_rows.leftCols(N);
    D.bottomRows(extra_rows.rows()) = extra_rows.rightCols(k);
  }
  const int k = static_cast<int>(C.rows());
  if (s.B.cols() != k) throw SingularError("bordered system is not square");
  const int n = N + k;

  auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(n);
    out.head(N) = s.A * v.head(N) + s.B * v.tail(k);
    out.tail(k) = C * v.head(N) + D * v.tail(k);
    return out;
  };

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(s.A);
  Eigen::VectorXd sol(n);
  if (lu.info() == Eigen::Success) {
    auto schur_solve = [&](const Eigen::VectorXd& b) {
      Eigen::VectorXd f = b.head(N);
      Eigen::VectorXd g = b.tail(k);
      Eigen::MatrixXd X(N, k);
      for (int j = 0; j < k; ++j) X.col(j) = lu.solve(s.B.col(j));
      Eigen::VectorXd y = lu.solve(f);
      Eigen::MatrixXd S = D - C * X;
      Eigen::PartialPivLU<Eigen::MatrixXd> slu(S);
      Eigen::VectorXd z = slu.solve(g - C * y);
      Eigen::VectorXd out(n);
      out.head(N) = y - X * z;
      out.tail(k) = z;
      return out;
    };
    sol = schur_solve(rhs);
    Eigen::VectorXd corr = schur_solve(rhs - apply(sol));
    if (corr.allFinite()) sol += corr;
    if (sol.allFinite()) return sol;
  }

  // fallback: factor the full bordered matrix sparsely
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < s.A.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(s.A, j); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()),
                        static_cast<int>(it.col()), it.value());
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < k; ++j)
      if (s.B(i, j) != 0.0) trip.emplace_back(i, N + j, s.B(i, j));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < N; ++j)
      if (C(i, j) != 0.0) trip.emplace_back(N + i, j, C(i, j));
    for (int j = 0; j < k; ++j)
      if (D(i, j) != 0.0) trip.emplace_back(N + i, N + j, D(i, j));
  }
  Eigen::SparseMatrix<double> full(n, n);
  full.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> flu;
  flu.compute(full);
  if (flu.info() != Eigen::Success)
    throw SingularError("bordered Jacobian is singular");
  sol = flu.solve(rhs);
  Eigen::VectorXd corr = flu.solve(rhs - apply(sol));
  if (corr.allFinite()) sol += corr;
  if (!sol.allFinite()) throw SingularError("bordered solve produced NaN");
  return sol;
}

}  // namespace

Eigen::MatrixXd jacobian_dense(const WaveProfile& p) {
  Assembled s = assemble(p, false);
  const int N = p.grid.N;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N + 2, N + 2);
  J.topLeftCorner(N, N) = Eigen::MatrixXd(s.A);
  J.topRightCorner(N, 2) = s.B;
  J.bottomLeftCorner(2, N) = s.C;
  J.bottomRightCorner(2, 2) = s.D;
  return J;
}

Eigen::VectorXd solve_bordered(const WaveProfile& p,
                               const Eigen::VectorXd& rhs) {
  Assembled s = assemble(p, false);
  return solve_assembled(s, Eigen::MatrixXd(), rhs);
}

// ---------------------------------------------------------------------------
// Newton
// ---------------------------------------------------------------------------

namespace {

// Roundoff floor of the residual: the derivative stencil amplifies rounding
// by ~|c|/h and the coupling terms by the coefficient magnitudes, so a fixed
// absolute tolerance becomes unattainable on fine grids at large speeds.
double residual_floor(const WaveProfile& p) {
  double amp = 1.0 + std::abs(p.c) / p.grid.h +
               p.m * (6.0 + 2.0 * p.beta) + std::abs(p.mu);
  double qn = p.q.size() > 0 ? p.q.cwiseAbs().maxCoeff() : 0.0;
  return 32.0 * std::numeric_limits<double>::epsilon() * amp *
         std::max(1.0, qn);
}

}  // namespace

WaveProfile newton_solve(const WaveProfile& p0, double tol, int max_iter) {
  WaveProfile p = p0;
  const int N = p.grid.N;
  const double tol_eff = std::max(tol, residual_floor(p));
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd r = residual(p);
    if (!r.allFinite()) throw ConvergenceError("Newton residual is not finite");
    double rn = r.cwiseAbs().maxCoeff();
    if (rn <= std::max(tol_eff, residual_floor(p))) return p;
    Assembled s = assemble(p, false);
    Eigen::VectorXd step = solve_assembled(s, Eigen::MatrixXd(), r);
    // Step control: Newton residuals here are legitimately non-monotone for
    // an iteration or two, so prefer a decrease, but tolerate a bounded
    // increase of the full step rather than stalling.
    auto apply_step = [&](double damp) {
      WaveProfile trial = p;
      trial.q -= damp * step.head(N);
      trial.c -= damp * step[N];
      trial.mu -= damp * step[N + 1];
      return trial;
    };
    WaveProfile full = apply_step(1.0);
    Eigen::VectorXd rf = residual(full);
    double rfn = rf.allFinite() ? rf.cwiseAbs().maxCoeff()
                                : std::numeric_limits<double>::infinity();
    if (rfn <= 0.5 * rn) {
      p = full;
      continue;
    }
    bool moved = false;
    for (double damp = 0.5; damp >= 1.0 / 256.0; damp *= 0.5) {
      WaveProfile trial = apply_step(damp);
      Eigen::VectorXd rt = residual(trial);
      if (rt.allFinite() && rt.cwiseAbs().maxCoeff() < rn) {
        p = trial;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (rfn <= 10.0 * rn) {
        p = full;  // bounded uphill step; max_iter still limits the search
      } else {
        throw ConvergenceError("Newton stalled at residual " +
                               std::to_string(rn));
      }
    }
  }
  Eigen::VectorXd r = residual(p);
  if (r.cwiseAbs().maxCoeff() <= std::max(tol_eff, residual_floor(p))) return p;
  throw ConvergenceError("Newton did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

// ---------------------------------------------------------------------------
// Mesh refinement
// ---------------------------------------------------------------------------

bool needs_h_refinement(const WaveProfile& p) {
  const int N = p.grid.N;
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    double d2 = p.q[wrap(i + 1, N)] - 2.0 * p.q[i] + p.q[wrap(i - 1, N)];
    worst = std::max(worst, std::abs(d2));
  }
  return worst > 0.03;
}

bool needs_L_refinement(const WaveProfile& p) {
  const Grid& g = p.grid;
  const int N = g.N;
  double far = p.far_field();
  double xc = p.centroid();
  double peak = 0.0;
  for (int i = 0; i < N; ++i)
    peak = std::max(peak, std::abs(p.q[i] - far));
  if (peak == 0.0) return false;
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    double d = std::abs(g.xi(i) - xc);
    d = std::min(d, g.L - d);  // circular distance
    if (d >= 0.2 * g.L) worst = std::max(worst, std::abs(p.q[i] - far));
  }
  return worst > 0.01 * peak;
}

namespace {

// periodic 4-point (cubic Lagrange) resampling at fractional node position x
double cubic_sample(const Eigen::VectorXd& q, double x) {
  const int N = static_cast<int>(q.size());
  int j = static_cast<int>(std::floor(x));
  double t = x - j;
  double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return wm1 * q[wrap(j - 1, N)] + w0 * q[wrap(j, N)] + w1 * q[wrap(j + 1, N)] +
         w2 * q[wrap(j + 2, N)];
}

}  // namespace

WaveProfile refine_h(const WaveProfile& p) {
  // ell -> 2*ell + 1 keeps ell odd: an even ell puts the Nyquist mode
  // (-1)^i in the kernel of both the derivative stencil and the delay
  // shifts, which degrades the small-amplitude Jacobian to near-singular
  WaveProfile out = p;
  out.grid = Grid::make(p.grid.L, p.grid.ell_g * 2 + 1);
  const double ratio =
      static_cast<double>(p.grid.ell_g) / out.grid.ell_g;
  out.q.resize(out.grid.N);
  for (int i = 0; i < out.grid.N; ++i)
    out.q[i] = cubic_sample(p.q, i * ratio);
  return out;
}

WaveProfile refine_L(const WaveProfile& p) {
  const int N = p.grid.N;
  WaveProfile out = p;
  out.grid = Grid::make(2.0 * p.grid.L, p.grid.ell_g);
  double far = p.far_field();
  out.q = Eigen::VectorXd::Constant(2 * N, far);
  out.q.segment(N / 2, N) = p.q;
  // doubling the domain adds a stretch of background; the total-mass
  // constant must absorb it or the constraint would force a different wave
  if (p.normalization == Normalization::TotalMass)
    out.M = p.M + p.grid.L * (p.m + far);
  return out;
}

WaveProfile recenter(const WaveProfile& p) {
  const int N = p.grid.N;
  int shift = static_cast<int>(std::lround(p.centroid() / p.grid.h));
  if (shift == 0) return p;
  WaveProfile out = p;
  for (int i = 0; i < N; ++i) out.q[i] = p.q[wrap(i + shift, N)];
  return out;
}

// ---------------------------------------------------------------------------
// Secant continuation
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd pack(const WaveProfile& p) {
  const int N = p.grid.N;
  Eigen::VectorXd u(N + 3);
  u.head(N) = p.q;
  u[N] = p.c;
  u[N + 1] = p.mu;
  u[N + 2] = p.beta;
  return u;
}

void unpack(const Eigen::VectorXd& u, WaveProfile& p) {
  const int N = p.grid.N;
  p.q = u.head(N);
  p.c = u[N];
  p.mu = u[N + 1];
  p.beta = u[N + 2];
}

// Corrector for one continuation step: residual rows plus the secant row
// s . (u - u_pred) = 0, solved for (q, c, mu, beta).
WaveProfile newton_secant(WaveProfile p, const Eigen::VectorXd& s_dir,
                          const Eigen::VectorXd& u_pred, double tol,
                          int max_iter) {
  const int N = p.grid.N;
  const double tol0 = tol;
  for (int it = 0; it < max_iter; ++it) {
    double tol_eff = std::max(tol0, residual_floor(p));
    Eigen::VectorXd u = pack(p);
    Eigen::VectorXd r(N + 3);
    r.head(N + 2) = residual(p);
    r[N + 2] = s_dir.dot(u - u_pred);
    if (!r.allFinite())
      throw ConvergenceError("continuation residual is not finite");
    double rn = r.cwiseAbs().maxCoeff();
    if (rn <= tol_eff) return p;
    Assembled a = assemble(p, true);
    Eigen::MatrixXd secant_row(1, N + 3);
    secant_row = s_dir.transpose();
    Eigen::VectorXd step = solve_assembled(a, secant_row, r);
    auto trial_res = [&](const WaveProfile& t) {
      Eigen::VectorXd rt(N + 3);
      rt.head(N + 2) = residual(t);
      rt[N + 2] = s_dir.dot(pack(t) - u_pred);
      return rt.allFinite() ? rt.cwiseAbs().maxCoeff()
                            : std::numeric_limits<double>::infinity();
    };
    WaveProfile full = p;
    unpack(u - step, full);
    double rfn = trial_res(full);
    if (rfn <= 0.5 * rn) {
      p = full;
      continue;
    }
    bool moved = false;
    for (double damp = 0.5; damp >= 1.0 / 256.0; damp *= 0.5) {
      WaveProfile trial = p;
      unpack(u - damp * step, trial);
      if (trial_res(trial) < rn) {
        p = trial;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (rfn <= 10.0 * rn) {
        p = full;
      } else {
        throw ConvergenceError("secant corrector stalled at residual " +
                               std::to_string(rn));
      }
    }
  }
  Eigen::VectorXd r(N + 3);
  r.head(N + 2) = residual(p);
  r[N + 2] = s_dir.dot(pack(p) - u_pred);
  if (r.cwiseAbs().maxCoeff() <= std::max(tol0, residual_floor(p))) return p;
  throw ConvergenceError("secant corrector did not converge");
}

BranchPoint make_point(const WaveProfile& p) {
  return BranchPoint{p.beta, p.c, p.m_infinity(), p};
}

}  // namespace

Branch continue_branch(const WaveProfile& start, double beta_target,
                       double dbeta0) {
  if (dbeta0 <= 0.0) throw DomainError("continuation requires dbeta0 > 0");
  Branch branch;
  WaveProfile p = newton_solve(recenter(start));
  branch.points.push_back(make_point(p));
  if (p.beta == beta_target) return branch;
  const double dir = beta_target > p.beta ? 1.0 : -1.0;

  bool have_secant = false;
  Eigen::VectorXd u_prev;
  double dbeta = std::min(dbeta0, 0.05);
  int successes = 0;

  while (std::abs(p.beta - beta_target) > 1e-12) {
    // mesh management between steps invalidates the secant history
    bool refined = false;
    try {
      while (needs_h_refinement(p)) {
        p = newton_solve(refine_h(p));
        std::ostringstream msg;
        msg << "h-refined to ell_g=" << p.grid.ell_g << " at beta=" << p.beta;
        branch.history.push_back(msg.str());
        refined = true;
      }
      while (needs_L_refinement(p)) {
        p = newton_solve(refine_L(p));
        std::ostringstream msg;
        msg << "L-doubled to L=" << p.grid.L << " at beta=" << p.beta;
        branch.history.push_back(msg.str());
        refined = true;
      }
      if (std::abs(p.centroid()) > 2.0 * p.grid.h) {
        p = newton_solve(recenter(p));
        refined = true;
      }
    } catch (const ConvergenceError& e) {
      std::ostringstream msg;
      msg << "refinement re-solve failed at beta=" << p.beta << ": "
          << e.what();
      throw BranchTruncated(msg.str(), std::move(branch));
    }
    if (refined) have_secant = false;

    double step = std::min(dbeta, std::abs(beta_target - p.beta));
    double beta_next = p.beta + dir * step;
    const int N = p.grid.N;

    Eigen::VectorXd u_cur = pack(p);
    Eigen::VectorXd s_dir, u_pred;
    if (have_secant && u_prev.size() == u_cur.size()) {
      s_dir = u_cur - u_prev;
      double nrm = s_dir.norm();
      if (nrm > 0.0 && std::abs(s_dir[N + 2]) > 1e-14 * nrm) {
        s_dir /= nrm;
        double ds = (beta_next - p.beta) / s_dir[N + 2];
        u_pred = u_cur + ds * s_dir;
      } else {
        have_secant = false;
      }
    }
    if (!have_secant || u_pred.size() == 0) {
      s_dir = Eigen::VectorXd::Zero(N + 3);
      s_dir[N + 2] = 1.0;
      u_pred = u_cur;
      u_pred[N + 2] = beta_next;
    }

    WaveProfile trial = p;
    unpack(u_pred, trial);
    try {
      trial = newton_secant(trial, s_dir, u_pred, 1e-11, 25);
    } catch (const ConvergenceError& e) {
      dbeta *= 0.5;
      successes = 0;
      if (dbeta < 1e-7) {
        std::ostringstream msg;
        msg << "continuation step underflow; last converged beta=" << p.beta;
        throw BranchTruncated(msg.str(), std::move(branch));
      }
      continue;
    } catch (const SingularError& e) {
      dbeta *= 0.5;
      successes = 0;
      if (dbeta < 1e-7) {
        std::ostringstream msg;
        msg << "continuation step underflow; last converged beta=" << p.beta;
        throw BranchTruncated(msg.str(), std::move(branch));
      }
      continue;
    }

    u_prev = u_cur;
    have_secant = true;
    p = trial;
    branch.points.push_back(make_point(p));
    if (++successes >= 3) {
      dbeta = std::min(dbeta * 1.3, 0.05);
      successes = 0;
    }
  }
  return branch;
}

// ---------------------------------------------------------------------------
// Conserved functional
// ---------------------------------------------------------------------------

namespace {

// integral over one unit interval given ell+1 node values (composite
// Simpson; a 3/8 block closes the panel count when ell is odd)
double unit_integral(const std::vector<double>& f, double h) {
  int n = static_cast<int>(f.size()) - 1;
  double s = 0.0;
  int start = 0;
  if (n % 2 != 0) {
    // 3/8 rule on the first three panels
    s += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    start = 3;
  }
  for (int i = start; i < n; i += 2)
    s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  return s;
}

}  // namespace

double conserved_phi(const WaveProfile& p, double tau) {
  const Grid& g = p.grid;
  const int N = g.N, l = g.ell_g;
  const int base = wrap(N / 2 + static_cast<int>(std::lround(tau * l)), N);
  auto Q = [&](int idx) { return p.m + p.q[wrap(idx, N)]; };

  std::vector<double> f(l + 1);
  // integral of Q(y-1)Q(y+1) over [-1, 0]
  for (int s = 0; s <= l; ++s)
    f[s] = Q(base - l + s - l) * Q(base - l + s + l);
  double I1 = unit_integral(f, g.h);
  // over [0, 1]
  for (int s = 0; s <= l; ++s) f[s] = Q(base + s - l) * Q(base + s + l);
  double I2 = unit_integral(f, g.h);
  // beta * integral of Q^2 over [0, 1]
  for (int s = 0; s <= l; ++s) {
    double v = Q(base + s);
    f[s] = v * v;
  }
  double I3 = p.beta * unit_integral(f, g.h);

  return -p.c * Q(base) + I1 - I2 + I3;
}

// ---------------------------------------------------------------------------
// Discretization audit and seeding
// ---------------------------------------------------------------------------

ErrorAudit error_audit(const WaveProfile& p) {
  auto rel_change = [&](const WaveProfile& fine) {
    double qmax = p.peak();
    double dc = std::abs(fine.c - p.c) / std::max(1.0, std::abs(p.c));
    double dq = std::abs(fine.peak() - qmax) / std::max(1e-30, qmax);
    if (qmax == 0.0) dq = fine.peak();
    return std::max(dc, dq);
  };
  WaveProfile fine_h = newton_solve(refine_h(p));
  WaveProfile fine_L = newton_solve(refine_L(p));
  return ErrorAudit{rel_change(fine_h), rel_change(fine_L)};
}

WaveProfile theorem1_seed(double beta, double m, const Grid& grid) {
  asym::Theorem1Profile t = asym::theorem1_profile(beta, m);
  WaveProfile p;
  p.grid = grid;
  p.q.resize(grid.N);
  for (int i = 0; i < grid.N; ++i) p.q[i] = t.eval(grid.xi(i));
  p.c = t.c;
  p.mu = 0.0;
  p.beta = beta;
  p.m = m;
  p.normalization = Normalization::BackgroundMass;
  p.M = 0.0;
  return p;
}

}  // namespace driftlab::tw
