#pragma once
#include <array>
#include <vector>

#include "driftlab/rational.hpp"

namespace driftlab::asym {

// ---------------------------------------------------------------------------
// Closed-form predictions
// ---------------------------------------------------------------------------

// Averaged drift speed magnitude of a mass-m party for small beta:
// 2*beta*m/pi, optionally with the 0.467*beta^{3/2} correction subtracted.
double small_beta_speed(double beta, double m, bool with_correction);

// sech^2 profile predicted near the stability threshold beta -> 2.
struct Theorem1Profile {
  double peak;   // amplitude above the background m
  double decay;  // sech^2 argument rate
  double c;      // wave speed
  double beta;
  double m;

  // deviation from the background at comoving coordinate xi
  double eval(double xi) const;
};

Theorem1Profile theorem1_profile(double beta, double m);

// ---------------------------------------------------------------------------
// Reduced vector fields
// ---------------------------------------------------------------------------

struct ReducedState3 {
  double A0, A1, A2;
  double beta_t;  // 2 - beta
  double c_t;     // c - 4m
  double m;
};

// Truncated cubic reduced field on the kernel coordinates (A0, A1, A2).
std::array<double, 3> reduced3_rhs(const ReducedState3& s);

// ---------------------------------------------------------------------------
// Exact polynomial operator (degrees <= 6, coefficients exact rationals)
// ---------------------------------------------------------------------------

// p[i] is the coefficient of xi^i.
using RatPoly = std::array<Rat, 9>;

RatPoly poly_shift(const RatPoly& p, int k);  // p(xi + k)
RatPoly poly_derivative(const RatPoly& p);
RatPoly poly_mul(const RatPoly& a, const RatPoly& b);  // truncates above deg 8

// T q = -4m q' - 6m q + m[-q(.-2) + 2q(.-1) + 6q(.+1) - q(.+2)].
// Every term carries a factor m, so the exact-rational routine returns T q / m.
RatPoly apply_T00_rat(const RatPoly& q);

// Floating-point variant including the factor m.
std::array<double, 9> apply_T00_poly(const std::array<double, 9>& q, double m);

// ---------------------------------------------------------------------------
// Melnikov condition for the planar reduced equation
// ---------------------------------------------------------------------------

double a_star(double zeta);  // (3/2) sech^2(zeta/2)

struct MelnikovParts {
  double ip_aprime_aprime;    // <a*', a*'>
  double ip_aprime_a_aprime;  // <a*', a* a*'>
  double residual;            // value of the solvability condition at c0
};

MelnikovParts melnikov(double c0);

// Root of the (affine-in-c0) Melnikov residual.
double melnikov_root();

// ---------------------------------------------------------------------------
// Transcritical corner passage
// ---------------------------------------------------------------------------

// Integrates the planar corner system from the section {x - mu = 2 delta}
// (start (delta, -delta)) until the first crossing of {x + mu = 2 delta};
// returns the elapsed time, ~ 2 delta / beta at leading order.
double corner_passage(double beta, double delta);

// ---------------------------------------------------------------------------
// Homoclinic of the planar reduced equation by shooting
// ---------------------------------------------------------------------------

struct Homoclinic2 {
  std::vector<double> zeta;  // peak aligned at zeta = 0
  std::vector<double> a0;
  double c0;
};

Homoclinic2 reduced2_homoclinic(double beta_t);

}  // namespace driftlab::asym
