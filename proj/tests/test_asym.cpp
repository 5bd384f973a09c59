#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "driftlab/asym.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/quad.hpp"

using namespace driftlab;
using asym::RatPoly;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("adaptive quadrature on closed-form integrals") {
  double s = quad::integrate([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(std::abs(s - 2.0) < 1e-12);
  double g = quad::integrate(
      [](double x) {
        double c = 1.0 / std::cosh(x);
        return c * c;
      },
      -50.0, 50.0);
  CHECK(std::abs(g - 2.0) < 1e-11);
  // depth-limited call on an oscillatory integrand fails loudly
  CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(200.0 * x); },
                                  0.0, 10.0, 1e-14, 3),
                  QuadratureError);
}

TEST_CASE("small-beta drift speed formula") {
  CHECK(asym::small_beta_speed(0.1, 1.0, false) ==
        doctest::Approx(2.0 * 0.1 / kPi).epsilon(1e-14));
  CHECK(asym::small_beta_speed(0.1, 1.0, true) ==
        doctest::Approx(2.0 * 0.1 / kPi - 0.467 * std::pow(0.1, 1.5))
            .epsilon(1e-14));
  // both terms scale linearly with the party mass
  CHECK(asym::small_beta_speed(0.1, 2.0, true) ==
        doctest::Approx(2.0 * asym::small_beta_speed(0.1, 1.0, true)));
  CHECK_THROWS_AS(asym::small_beta_speed(-0.1, 1.0, false), DomainError);
}

TEST_CASE("near-threshold sech^2 profile") {
  auto p = asym::theorem1_profile(1.9, 2.0);
  const double bt = 0.1;
  CHECK(p.peak == doctest::Approx(2.0 * 0.7 * bt));
  CHECK(p.decay == doctest::Approx(std::sqrt(7.0 * bt / 20.0)));
  CHECK(p.c == doctest::Approx(2.0 * (4.0 - 16.0 * bt / 15.0)));
  CHECK(p.eval(0.0) == doctest::Approx(p.peak));
  double xi = 1.3;
  double sech = 1.0 / std::cosh(p.decay * xi);
  CHECK(p.eval(xi) == doctest::Approx(p.peak * sech * sech));
  CHECK_THROWS_AS(asym::theorem1_profile(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(asym::theorem1_profile(1.9, 0.0), DomainError);
}

TEST_CASE("Melnikov inner products and root") {
  auto parts = asym::melnikov(0.0);
  CHECK(std::abs(parts.ip_aprime_aprime - 6.0 / 5.0) < 1e-10);
  CHECK(std::abs(parts.ip_aprime_a_aprime - 36.0 / 35.0) < 1e-10);
  // the solvability condition is affine in c0
  double r0 = asym::melnikov(-1.0).residual;
  double r1 = asym::melnikov(0.0).residual;
  double r2 = asym::melnikov(1.0).residual;
  CHECK(std::abs(r0 - 2.0 * r1 + r2) < 1e-10);
  double root = asym::melnikov_root();
  CHECK(std::abs(root - (-16.0 / 15.0)) < 1e-8);
  CHECK(std::abs(asym::melnikov(root).residual) < 1e-9);
}

TEST_CASE("explicit homoclinic a_star") {
  CHECK(asym::a_star(0.0) == doctest::Approx(1.5));
  CHECK(asym::a_star(2.0) == doctest::Approx(asym::a_star(-2.0)));
  CHECK(asym::a_star(30.0) < 1e-10);
}

TEST_CASE("exact polynomial helpers") {
  RatPoly p{};
  p[4] = Rat(3);
  p[2] = Rat(-1, 2);
  // shifting there and back is the identity
  auto round = asym::poly_shift(asym::poly_shift(p, 3), -3);
  for (int i = 0; i < 9; ++i) CHECK(round[i] == p[i]);
  // derivative of 3 xi^4 - xi^2/2
  auto d = asym::poly_derivative(p);
  CHECK(d[3] == Rat(12));
  CHECK(d[1] == Rat(-1));
  CHECK(d[0] == Rat(0));
  // multiplication truncates above degree 8
  RatPoly a{}, b{};
  a[4] = Rat(1);
  b[5] = Rat(1);
  auto ab = asym::poly_mul(a, b);
  for (int i = 0; i < 9; ++i) CHECK(ab[i] == Rat(0));
  b[3] = Rat(2);
  ab = asym::poly_mul(a, b);
  CHECK(ab[7] == Rat(2));
}

TEST_CASE("operator rows on monomials (exact rational arithmetic)") {
  auto row = [](int k) {
    RatPoly q{};
    q[k] = Rat(1);
    return asym::apply_T00_rat(q);
  };
  auto r3 = row(3);
  CHECK(r3[0] == Rat(4));
  auto r4 = row(4);
  CHECK(r4[1] == Rat(16));
  CHECK(r4[0] == Rat(-24));
  auto r5 = row(5);
  CHECK(r5[2] == Rat(40));
  CHECK(r5[1] == Rat(-120));
  CHECK(r5[0] == Rat(4));
  auto r6 = row(6);
  CHECK(r6[3] == Rat(80));
  CHECK(r6[2] == Rat(-360));
  CHECK(r6[1] == Rat(24));
  CHECK(r6[0] == Rat(-120));
  // constants, xi, xi^2 are annihilated
  for (int k : {0, 1, 2})
    for (const Rat& c : row(k)) CHECK(c == Rat(0));
}

TEST_CASE("floating-point operator matches the rational one times m") {
  RatPoly q{};
  q[3] = Rat(-3, 2);
  q[5] = Rat(7, 10);
  q[6] = Rat(1, 4);
  auto exact = asym::apply_T00_rat(q);
  std::array<double, 9> qd{};
  for (int i = 0; i < 9; ++i) qd[i] = q[i].value();
  for (double m : {1.0, 2.5}) {
    auto approx = asym::apply_T00_poly(qd, m);
    for (int i = 0; i < 9; ++i)
      CHECK(std::abs(approx[i] - m * exact[i].value()) <
            1e-12 * (1.0 + std::abs(approx[i])));
  }
}

TEST_CASE("reduced cubic field basics") {
  asym::ReducedState3 origin{0.0, 0.0, 0.0, 0.1, -0.2, 1.0};
  auto r = asym::reduced3_rhs(origin);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
  asym::ReducedState3 s{0.3, -0.1, 0.05, 0.1, -0.2, 1.0};
  auto v = asym::reduced3_rhs(s);
  CHECK(v[0] == s.A1);
  CHECK(v[1] == 2.0 * s.A2);
  // the third component scales as 1/m with the quadratic part fixed
  asym::ReducedState3 s2 = s;
  s2.m = 2.0;
  s2.beta_t = 0.05;  // keep m*beta_t products equal
  auto v2 = asym::reduced3_rhs(s2);
  CHECK(v2[2] == doctest::Approx(0.5 * v[2]));
  asym::ReducedState3 bad = s;
  bad.m = 0.0;
  CHECK_THROWS_AS(asym::reduced3_rhs(bad), DomainError);
}

TEST_CASE("corner passage time approaches the slow-manifold value") {
  const double delta = 0.1;
  // the finite-delta limit of t*beta as beta -> 0 is -ln(1 - 2 delta)
  double limit = -std::log(1.0 - 2.0 * delta);
  double tb1 = 0.01 * asym::corner_passage(0.01, delta);
  CHECK(std::abs(tb1 - limit) / limit < 0.03);
  // slower drift spends more rescaled time near the corner
  double tb2 = 0.02 * asym::corner_passage(0.02, delta);
  double tb4 = 0.04 * asym::corner_passage(0.04, delta);
  CHECK(tb4 < tb2);
  CHECK(tb2 < tb1);
  CHECK_THROWS_AS(asym::corner_passage(0.5, delta), DomainError);
  CHECK_THROWS_AS(asym::corner_passage(0.01, 0.5), DomainError);
}

TEST_CASE("planar homoclinic shooting") {
  auto exact = asym::reduced2_homoclinic(0.0);
  CHECK(exact.c0 == doctest::Approx(-16.0 / 15.0));
  for (std::size_t i = 0; i < exact.zeta.size(); i += 500)
    CHECK(exact.a0[i] == doctest::Approx(asym::a_star(exact.zeta[i])));

  const double bt = 0.02;
  auto h = asym::reduced2_homoclinic(bt);
  CHECK(std::abs(h.c0 - (-16.0 / 15.0)) < 1.0 * std::sqrt(bt));
  double sup = 0.0;
  for (std::size_t i = 0; i < h.zeta.size(); ++i)
    sup = std::max(sup, std::abs(h.a0[i] - asym::a_star(h.zeta[i])));
  CHECK(sup <= 5.0 * std::sqrt(bt));
  CHECK_THROWS_AS(asym::reduced2_homoclinic(0.2), DomainError);
}
