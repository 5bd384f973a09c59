#include "driftlab/asym.hpp"

#include <cmath>

#include "driftlab/errors.hpp"
#include "driftlab/quad.hpp"

namespace driftlab::asym {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

// ---------------------------------------------------------------------------
// Closed-form predictions
// ---------------------------------------------------------------------------

double small_beta_speed(double beta, double m, bool with_correction) {
  if (beta < 0.0) throw DomainError("small_beta_speed requires beta >= 0");
  double v = 2.0 * beta * m / kPi;
  if (with_correction) v -= 0.467 * std::pow(beta, 1.5) * m;
  return v;
}

double Theorem1Profile::eval(double xi) const {
  double s = 1.0 / std::cosh(decay * xi);
  return peak * s * s;
}

Theorem1Profile theorem1_profile(double beta, double m) {
  if (beta >= 2.0) throw DomainError("theorem1_profile requires beta < 2");
  if (!(m > 0.0)) throw DomainError("theorem1_profile requires m > 0");
  double bt = 2.0 - beta;
  Theorem1Profile p;
  p.peak = m * (7.0 * bt / 10.0);
  p.decay = std::sqrt(7.0 * bt / 20.0);
  p.c = m * (4.0 - 16.0 * bt / 15.0);
  p.beta = beta;
  p.m = m;
  return p;
}

// ---------------------------------------------------------------------------
// Reduced vector fields
// ---------------------------------------------------------------------------

std::array<double, 3> reduced3_rhs(const ReducedState3& s) {
  if (s.m == 0.0) throw DomainError("reduced3_rhs requires m != 0");
  double bracket = s.A0 * s.A1 + 1.5 * s.A1 * s.A1 + 3.0 * s.A0 * s.A2 -
                   0.5 * s.m * s.A1 * s.beta_t - 0.25 * s.A1 * s.c_t -
                   2.0 * s.m * s.A2 * s.beta_t - 0.75 * s.A2 * s.c_t +
                   (71.0 / 5.0) * s.A1 * s.A2 + (457.0 / 10.0) * s.A2 * s.A2;
  return {s.A1, 2.0 * s.A2, -3.0 / s.m * bracket};
}

// ---------------------------------------------------------------------------
// Exact polynomial operator
// ---------------------------------------------------------------------------

namespace {

std::int64_t binom(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

RatPoly poly_shift(const RatPoly& p, int k) {
  RatPoly out{};
  for (int i = 0; i < 9; ++i) {
    if (p[i] == Rat(0)) continue;
    for (int j = 0; j <= i; ++j)
      out[j] += p[i] * Rat(binom(i, j) * ipow(k, i - j));
  }
  return out;
}

RatPoly poly_derivative(const RatPoly& p) {
  RatPoly out{};
  for (int i = 1; i < 9; ++i) out[i - 1] = p[i] * Rat(i);
  return out;
}

RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
  RatPoly out{};
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j + i < 9; ++j) out[i + j] += a[i] * b[j];
  return out;
}

RatPoly apply_T00_rat(const RatPoly& q) {
  RatPoly dq = poly_derivative(q);
  RatPoly sm2 = poly_shift(q, -2), sm1 = poly_shift(q, -1);
  RatPoly sp1 = poly_shift(q, 1), sp2 = poly_shift(q, 2);
  RatPoly out{};
  for (int i = 0; i < 9; ++i)
    out[i] = Rat(-4) * dq[i] + Rat(-6) * q[i] - sm2[i] + Rat(2) * sm1[i] +
             Rat(6) * sp1[i] - sp2[i];
  return out;
}

std::array<double, 9> apply_T00_poly(const std::array<double, 9>& q, double m) {
  auto shift = [](const std::array<double, 9>& p, int k) {
    std::array<double, 9> out{};
    for (int i = 0; i < 9; ++i) {
      if (p[i] == 0.0) continue;
      for (int j = 0; j <= i; ++j)
        out[j] += p[i] * static_cast<double>(binom(i, j) * ipow(k, i - j));
    }
    return out;
  };
  std::array<double, 9> dq{};
  for (int i = 1; i < 9; ++i) dq[i - 1] = q[i] * i;
  auto sm2 = shift(q, -2), sm1 = shift(q, -1), sp1 = shift(q, 1),
       sp2 = shift(q, 2);
  std::array<double, 9> out{};
  for (int i = 0; i < 9; ++i)
    out[i] = m * (-4.0 * dq[i] - 6.0 * q[i] - sm2[i] + 2.0 * sm1[i] +
                  6.0 * sp1[i] - sp2[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Melnikov condition
// ---------------------------------------------------------------------------

double a_star(double zeta) {
  double s = 1.0 / std::cosh(0.5 * zeta);
  return 1.5 * s * s;
}

namespace {

double a_star_prime(double zeta) {
  double s = 1.0 / std::cosh(0.5 * zeta);
  return -1.5 * s * s * std::tanh(0.5 * zeta);
}

}  // namespace

MelnikovParts melnikov(double c0) {
  const double Z = 60.0;
  MelnikovParts p;
  p.ip_aprime_aprime = quad::integrate(
      [](double z) {
        double d = a_star_prime(z);
        return d * d;
      },
      -Z, Z, 1e-12);
  p.ip_aprime_a_aprime = quad::integrate(
      [](double z) {
        double d = a_star_prime(z);
        return d * a_star(z) * d;
      },
      -Z, Z, 1e-12);
  p.residual = 3.0 * (1.0 + 0.5 * c0) * p.ip_aprime_a_aprime -
               (2.0 + 0.75 * c0) * p.ip_aprime_aprime;
  return p;
}

double melnikov_root() {
  // residual is affine in c0: residual = r0 + c0 * slope
  MelnikovParts at0 = melnikov(0.0);
  MelnikovParts at1 = melnikov(1.0);
  double slope = at1.residual - at0.residual;
  if (std::abs(slope) < 1e-14)
    throw SingularError("Melnikov residual is independent of c0");
  return -at0.residual / slope;
}

// ---------------------------------------------------------------------------
// Transcritical corner passage
// ---------------------------------------------------------------------------

double corner_passage(double beta, double delta) {
  if (!(beta > 0.0 && beta <= 0.1))
    throw DomainError("corner_passage requires 0 < beta <= 0.1");
  if (!(delta > 0.0 && delta <= 0.2))
    throw DomainError("corner_passage requires 0 < delta <= 0.2");

  auto rhs = [beta](double x, double mu, double& dx, double& dmu) {
    dmu = beta * (1.0 - 2.0 * x);
    dx = -0.5 * (x * x - mu * mu) + dmu;
  };

  double x = delta, mu = -delta, t = 0.0;
  const double t_scale = 2.0 * delta / beta;
  const double t_max = 10.0 * t_scale;
  const double dt = std::min(1e-3, t_scale / 5e4);

  auto section = [delta](double xx, double mm) { return xx + mm - 2.0 * delta; };

  double prev = section(x, mu);
  while (t < t_max) {
    double k1x, k1m, k2x, k2m, k3x, k3m, k4x, k4m;
    rhs(x, mu, k1x, k1m);
    rhs(x + 0.5 * dt * k1x, mu + 0.5 * dt * k1m, k2x, k2m);
    rhs(x + 0.5 * dt * k2x, mu + 0.5 * dt * k2m, k3x, k3m);
    rhs(x + dt * k3x, mu + dt * k3m, k4x, k4m);
    double xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    double mn = mu + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    double cur = section(xn, mn);
    if (prev < 0.0 && cur >= 0.0) {
      // linear interpolation of the crossing time within the step
      double frac = prev / (prev - cur);
      return t + frac * dt;
    }
    x = xn;
    mu = mn;
    prev = cur;
    t += dt;
  }
  throw EscapeError("corner passage did not reach the exit section");
}

// ---------------------------------------------------------------------------
// Planar homoclinic by shooting
// ---------------------------------------------------------------------------

namespace {

struct ShotResult {
  int verdict;  // +1 undershoot (a crosses 0), -1 overturn (a' > 0 past peak)
  std::vector<double> t, a;
};

ShotResult shoot(double beta_t, double c0) {
  const double g1 = 3.0 * std::sqrt(3.0 * beta_t) * std::sqrt(1.0 + 0.5 * c0);
  const double g2 = std::sqrt(3.0 * beta_t) / std::sqrt(1.0 + 0.5 * c0) *
                    (2.0 + 0.75 * c0);
  auto acc = [&](double a, double ap) {
    return a - a * a + g1 * a * ap - g2 * ap;
  };
  const double nu = 0.5 * (-g2 + std::sqrt(g2 * g2 + 4.0));
  const double eps = 1e-8;
  double a = eps, ap = eps * nu, t = 0.0;
  const double dt = 1e-3;
  bool past_peak = false;
  ShotResult r;
  r.verdict = 0;
  while (t < 200.0) {
    r.t.push_back(t);
    r.a.push_back(a);
    double k1a = ap, k1p = acc(a, ap);
    double k2a = ap + 0.5 * dt * k1p, k2p = acc(a + 0.5 * dt * k1a, k2a);
    double k3a = ap + 0.5 * dt * k2p, k3p = acc(a + 0.5 * dt * k2a, k3a);
    double k4a = ap + dt * k3p, k4p = acc(a + dt * k3a, k4a);
    a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    ap += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    t += dt;
    if (ap < 0.0) past_peak = true;
    if (a < 0.0) {
      r.verdict = +1;
      return r;
    }
    if (past_peak && ap > 0.0 && a > 1e-6) {
      r.verdict = -1;
      return r;
    }
    if (past_peak && a < 1e-9) return r;  // clean homoclinic tail
  }
  return r;
}

}  // namespace

Homoclinic2 reduced2_homoclinic(double beta_t) {
  if (!(beta_t >= 0.0 && beta_t <= 0.05))
    throw DomainError("reduced2_homoclinic requires 0 <= beta_t <= 0.05");

  Homoclinic2 out;
  if (beta_t == 0.0) {
    out.c0 = -16.0 / 15.0;
    for (double z = -40.0; z <= 40.0; z += 0.01) {
      out.zeta.push_back(z);
      out.a0.push_back(a_star(z));
    }
    return out;
  }

  // bracket the homoclinic c0 by the shot verdict, then bisect
  double lo = -1.5, hi = -0.7;
  int vlo = 0, vhi = 0;
  double prev_c = lo;
  int prev_v = shoot(beta_t, lo).verdict;
  bool found = false;
  for (double c = lo + 0.05; c <= hi + 1e-12; c += 0.05) {
    int v = shoot(beta_t, c).verdict;
    if (v != 0 && prev_v != 0 && v != prev_v) {
      lo = prev_c;
      hi = c;
      vlo = prev_v;
      vhi = v;
      found = true;
      break;
    }
    if (v != 0) {
      prev_c = c;
      prev_v = v;
    }
  }
  if (!found) throw ConvergenceError("no homoclinic bracket for c0");
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    int v = shoot(beta_t, mid).verdict;
    if (v == 0) break;
    if (v == vlo)
      lo = mid;
    else
      hi = mid;
  }
  out.c0 = 0.5 * (lo + hi);
  ShotResult r = shoot(beta_t, out.c0);
  // align the peak at zeta = 0 to make the orbit comparable with a_star
  std::size_t ipk = 0;
  for (std::size_t i = 1; i < r.a.size(); ++i)
    if (r.a[i] > r.a[ipk]) ipk = i;
  double t_pk = r.t[ipk];
  out.zeta.reserve(r.t.size());
  out.a0.reserve(r.a.size());
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    out.zeta.push_back(r.t[i] - t_pk);
    out.a0.push_back(r.a[i]);
  }
  return out;
}

}  // namespace driftlab::asym
