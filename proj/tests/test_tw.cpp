#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "driftlab/tw.hpp"

using namespace driftlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

tw::WaveProfile zero_profile(double L, int ell, double beta, double c) {
  tw::WaveProfile p;
  p.grid = tw::Grid::make(L, ell);
  p.q = Eigen::VectorXd::Zero(p.grid.N);
  p.c = c;
  p.beta = beta;
  p.m = 1.0;
  return p;
}

tw::WaveProfile solved_small(double beta = 1.95) {
  auto grid = tw::Grid::make(20.0, 5);
  return tw::newton_solve(tw::theorem1_seed(beta, 1.0, grid));
}

}  // namespace

TEST_CASE("grid construction and validation") {
  auto g = tw::Grid::make(10.0, 5);
  CHECK(g.N == 50);
  CHECK(g.h == doctest::Approx(0.2));
  CHECK(g.xi(0) == doctest::Approx(-5.0));
  // even points-per-unit puts the Nyquist mode in the kernel of the
  // delay stencil, so it is rejected
  CHECK_THROWS(tw::Grid::make(10.0, 4));
  CHECK_THROWS(tw::Grid::make(-3.0, 5));
}

TEST_CASE("normalization names round-trip") {
  for (auto n : {tw::Normalization::TotalMass, tw::Normalization::PartyMass,
                 tw::Normalization::BackgroundMass})
    CHECK(tw::normalization_from_name(tw::normalization_name(n)) == n);
  CHECK_THROWS_AS(tw::normalization_from_name("unit-mass"), ConfigError);
}

TEST_CASE("the zero deviation solves the FDE for any speed") {
  for (double c : {0.0, 1.7, -3.0})
    for (double beta : {0.0, 0.8, 1.95}) {
      auto p = zero_profile(20.0, 5, beta, c);
      auto r = tw::residual(p);
      CHECK(r.cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("near-threshold seed is nearly a solution and Newton polishes it") {
  auto grid = tw::Grid::make(160.0, 5);
  auto seed = tw::theorem1_seed(1.95, 1.0, grid);
  double scale = seed.q.cwiseAbs().maxCoeff();
  CHECK(tw::residual(seed).cwiseAbs().maxCoeff() < 0.2 * scale);

  auto p = tw::newton_solve(seed);
  CHECK(std::abs(p.mu) <= 1e-10);
  // Theorem 1: c = 4 - 16/15 * 0.05 up to O((2-beta)^{3/2})
  CHECK(std::abs(p.c - (4.0 - 16.0 / 15.0 * 0.05)) < 1.5 * std::pow(0.05, 1.5));
  // profile is a positive hump on a pinned background
  CHECK(p.peak() > 0.03);
  CHECK(std::abs(p.far_field()) < 1e-8);
  CHECK(p.m_infinity() == doctest::Approx(1.0).epsilon(1e-8));
  for (int i = 0; i < p.grid.N; ++i) CHECK(p.m + p.q[i] > 0.0);
}

TEST_CASE("analytic Jacobian matches finite differences") {
  auto p = solved_small();
  auto J = tw::jacobian_dense(p);
  auto r0 = tw::residual(p);
  const double eps = 1e-7;
  double worst = 0.0;
  for (int col : {0, 17, 43, 99}) {  // spot-check q columns
    auto pp = p;
    pp.q[col] += eps;
    Eigen::VectorXd fd = (tw::residual(pp) - r0) / eps;
    worst = std::max(worst, (fd - J.col(col)).cwiseAbs().maxCoeff());
  }
  {
    auto pp = p;
    pp.c += eps;
    Eigen::VectorXd fd = (tw::residual(pp) - r0) / eps;
    worst = std::max(worst, (fd - J.col(p.grid.N)).cwiseAbs().maxCoeff());
  }
  {
    auto pp = p;
    pp.mu += eps;
    Eigen::VectorXd fd = (tw::residual(pp) - r0) / eps;
    worst = std::max(worst, (fd - J.col(p.grid.N + 1)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("bordered sparse solve agrees with dense LU") {
  auto p = solved_small();
  const int n = p.grid.N + 2;
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = std::sin(0.37 * i) + 0.1;
  Eigen::VectorXd xb = tw::solve_bordered(p, rhs);
  Eigen::VectorXd xd = tw::jacobian_dense(p).partialPivLu().solve(rhs);
  CHECK((xb - xd).cwiseAbs().maxCoeff() < 1e-8 * xd.cwiseAbs().maxCoeff());
}

TEST_CASE("FDE rows are equivariant under grid translations") {
  auto p = solved_small();
  const int N = p.grid.N;
  auto base = tw::residual(p);
  for (int k : {1, 7, 250}) {
    auto rolled = p;
    for (int i = 0; i < N; ++i) rolled.q[i] = p.q[(i + k) % N];
    auto r = tw::residual(rolled);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
      worst = std::max(worst, std::abs(r[i] - base[(i + k) % N]));
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("cubic resampling in refine_h is fourth-order accurate") {
  auto f = [](double xi, double L) { return std::exp(std::cos(2.0 * kPi * xi / L)); };
  auto interp_error = [&](int ell) {
    tw::WaveProfile p;
    p.grid = tw::Grid::make(10.0, ell);
    p.q.resize(p.grid.N);
    for (int i = 0; i < p.grid.N; ++i) p.q[i] = f(p.grid.xi(i), p.grid.L);
    auto r = tw::refine_h(p);
    double worst = 0.0;
    for (int i = 0; i < r.grid.N; ++i)
      worst = std::max(worst, std::abs(r.q[i] - f(r.grid.xi(i), r.grid.L)));
    return worst;
  };
  double e5 = interp_error(5);
  double e11 = interp_error(11);
  CHECK(e11 < e5 / 10.0);  // ~ (5/11)^4 = 0.043 expected
}

TEST_CASE("refinement preserves the solution branch point") {
  auto grid = tw::Grid::make(160.0, 5);
  auto p = tw::newton_solve(tw::theorem1_seed(1.92, 1.0, grid));
  auto ph = tw::newton_solve(tw::refine_h(p));
  CHECK(std::abs(ph.c - p.c) < 1e-4 * std::abs(p.c));
  CHECK(std::abs(ph.peak() - p.peak()) < 1e-3 * p.peak());
  auto pL = tw::newton_solve(tw::refine_L(p));
  CHECK(pL.grid.L == doctest::Approx(2.0 * p.grid.L));
  CHECK(std::abs(pL.c - p.c) < 1e-4 * std::abs(p.c));
}

TEST_CASE("refine_L keeps the total-mass constraint satisfiable") {
  auto grid = tw::Grid::make(160.0, 5);
  auto p = tw::newton_solve(tw::theorem1_seed(1.92, 1.0, grid));
  p.normalization = tw::Normalization::TotalMass;
  p.M = p.m * p.grid.L + p.q.sum() * p.grid.h;
  p = tw::newton_solve(p);
  auto pL = tw::refine_L(p);
  // the doubled domain absorbs L extra units of background mass into M,
  // so the enlarged profile still satisfies its own constraint row
  double mass = pL.m * pL.grid.L + pL.q.sum() * pL.grid.h;
  CHECK(std::abs(mass - pL.M) < 1e-8 * std::abs(pL.M));
  auto solved = tw::newton_solve(pL);
  CHECK(std::abs(solved.c - p.c) < 1e-4 * std::abs(p.c));
}

TEST_CASE("conserved functional is flat on solutions and only there") {
  auto grid = tw::Grid::make(160.0, 5);
  auto p = tw::newton_solve(tw::theorem1_seed(1.92, 1.0, grid));
  double phi0 = tw::conserved_phi(p, 0.0);
  double worst = 0.0;
  for (double tau : {0.8, 3.0, -12.0})
    worst = std::max(worst, std::abs(tw::conserved_phi(p, tau) - phi0));
  CHECK(worst < 1e-6 * std::abs(phi0));

  // negative control: a perturbed profile is not translation invariant
  auto bad = p;
  for (int i = 0; i < bad.grid.N; ++i)
    bad.q[i] += 0.02 * std::exp(-0.1 * std::pow(bad.grid.xi(i) - 11.0, 2));
  double bphi0 = tw::conserved_phi(bad, 0.0);
  double bworst = 0.0;
  for (double tau : {0.8, 3.0, -12.0})
    bworst = std::max(bworst, std::abs(tw::conserved_phi(bad, tau) - bphi0));
  CHECK(bworst > 100.0 * worst);
}

TEST_CASE("recenter moves the centroid to the origin") {
  auto grid = tw::Grid::make(160.0, 5);
  auto p = tw::newton_solve(tw::theorem1_seed(1.95, 1.0, grid));
  const int N = p.grid.N;
  auto shifted = p;
  for (int i = 0; i < N; ++i) shifted.q[i] = p.q[(i + 60) % N];
  auto rc = tw::recenter(shifted);
  CHECK(std::abs(rc.centroid()) <= 2.0 * p.grid.h + std::abs(p.centroid()));
}

TEST_CASE("secant continuation reaches the target and keeps mu at zero") {
  auto grid = tw::Grid::make(160.0, 5);
  auto start = tw::newton_solve(tw::theorem1_seed(1.95, 1.0, grid));
  auto branch = tw::continue_branch(start, 1.90, 0.01);
  REQUIRE(!branch.points.empty());
  CHECK(branch.points.front().beta == doctest::Approx(1.95));
  CHECK(branch.points.back().beta == doctest::Approx(1.90).epsilon(1e-10));
  for (const auto& pt : branch.points) {
    CHECK(std::abs(pt.profile.mu) <= 1e-10);
    CHECK(pt.c > 0.0);
  }
  // c decreases monotonically toward threshold on this stretch
  for (std::size_t i = 1; i < branch.points.size(); ++i)
    CHECK(branch.points[i].c < branch.points[i - 1].c);
}
