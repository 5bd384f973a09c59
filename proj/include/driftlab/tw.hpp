#pragma once
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "driftlab/errors.hpp"

namespace driftlab::tw {

// Periodic grid on [-L/2, L/2) with ell_g points per unit length, so the
// delay shifts +-1, +-2 land exactly on grid nodes.
struct Grid {
  double L = 10.0;
  int ell_g = 103;
  int N = 1030;
  double h = 0.0;  // 1/ell_g

  static Grid make(double L, int ell_g);
  double xi(int i) const { return -0.5 * L + h * i; }
  void validate() const;
};

enum class Normalization { TotalMass, PartyMass, BackgroundMass };

std::string normalization_name(Normalization n);
Normalization normalization_from_name(const std::string& s);

// Discretized traveling-wave unknowns: deviation q from the background
// parameter m, speed c, and dummy mass-loss multiplier mu.  Constants solve
// the homogeneous equation, so the background offset of q is pinned by the
// mass constraint row selected by `normalization` (with constant `M`;
// BackgroundMass pins the far-field average of q to zero instead).
struct WaveProfile {
  Grid grid;
  Eigen::VectorXd q;
  double c = 0.0;
  double mu = 0.0;
  double beta = 1.0;
  double m = 1.0;
  Normalization normalization = Normalization::BackgroundMass;
  double M = 0.0;  // constraint constant (unused by BackgroundMass)

  void validate() const;
  // average of q over the far-field band |xi - centroid| >= 0.45 L
  double far_field() const;
  double m_infinity() const { return m + far_field(); }
  double peak() const { return q.cwiseAbs().maxCoeff(); }
  // mass centroid of |q| in xi-coordinates (profile center for refinement)
  double centroid() const;
};

struct BranchPoint {
  double beta;
  double c;
  double m_infinity;
  WaveProfile profile;
};

struct Branch {
  std::vector<BranchPoint> points;
  std::vector<std::string> history;  // refinement / step-control events
};

// Raised when continuation cannot reach the target beta; carries the points
// converged so far so callers can still persist the partial branch.
struct BranchTruncated : BranchEndError {
  Branch partial;
  BranchTruncated(const std::string& what, Branch b)
      : BranchEndError(what), partial(std::move(b)) {}
};

// Pointwise FDE residual (rows 0..N-1), phase constraint (row N), and the
// mass constraint of the active normalization (row N+1).
Eigen::VectorXd residual(const WaveProfile& p);

// Analytic Jacobian of `residual` with respect to (q, c, mu), dense.
// Intended for oracle tests and small N; the solver assembles sparsely.
Eigen::MatrixXd jacobian_dense(const WaveProfile& p);

// Newton with a bordered sparse solve (Schur complement over the dense
// borders).  tol on the residual infinity norm.
WaveProfile newton_solve(const WaveProfile& p0, double tol = 1e-11,
                         int max_iter = 25);

// Solve a bordered system directly: core sparse rows/cols 0..N-1 plus k
// dense border rows/columns, exposed for the dense-LU oracle test.
Eigen::VectorXd solve_bordered(const WaveProfile& p,
                               const Eigen::VectorXd& rhs);

// Secant continuation in beta with adaptive step and mesh refinement.
Branch continue_branch(const WaveProfile& start, double beta_target,
                       double dbeta0);

// Translation-invariant functional of the full profile Q = m + q, evaluated
// at the base point shifted by tau (snapped to grid nodes).
double conserved_phi(const WaveProfile& p, double tau);

struct ErrorAudit {
  double h_error;  // relative change in (c, max|q|) after halving h
  double L_error;  // relative change after doubling L
};

ErrorAudit error_audit(const WaveProfile& p);

// Seed profile from the near-threshold sech^2 asymptotics (beta close to 2).
WaveProfile theorem1_seed(double beta, double m, const Grid& grid);

// Mesh refinement helpers (exposed for tests).
WaveProfile refine_h(const WaveProfile& p);  // ell_g, N doubled; cubic interp
WaveProfile refine_L(const WaveProfile& p);  // L, N doubled; far-field padding
bool needs_h_refinement(const WaveProfile& p);
bool needs_L_refinement(const WaveProfile& p);
// Rotate q so the centroid sits at xi = 0.
WaveProfile recenter(const WaveProfile& p);

}  // namespace driftlab::tw
