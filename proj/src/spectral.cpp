#include "driftlab/spectral.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace driftlab::spectral {

using model::dispersion;
using model::dispersion_d2sigma;
using model::dispersion_dsigma;

SaddlePoint spreading_speed(double beta, double m, Complex seed, Direction dir) {
  if (!(m > 0.0)) throw DomainError("spreading_speed requires m > 0");
  if (beta < 0.0) throw DomainError("spreading_speed requires beta >= 0");

  const double sgn = dir == Direction::Right ? 1.0 : -1.0;
  double sr = seed.real(), si = seed.imag();
  // initial v consistent with the pinching condition at the seed
  double v = si > 0.0 ? dispersion(Complex(sr, si), beta, m).real() / si : 1.0;

  auto evalF = [&](double a, double b, double vv, Eigen::Vector3d& F) {
    Complex s(a, b);
    Complex dl = dispersion_dsigma(s, beta, m);
    Complex l = dispersion(s, beta, m);
    F(0) = dl.real();
    F(1) = dl.imag() + sgn * vv;
    F(2) = l.real() - vv * b;
  };

  bool converged = false;
  Eigen::Vector3d F;
  for (int it = 0; it < 50; ++it) {
    evalF(sr, si, v, F);
    if (F.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, m)) {
      converged = true;
      break;
    }
    Complex s(sr, si);
    Complex d2 = dispersion_d2sigma(s, beta, m);
    Complex dl = dispersion_dsigma(s, beta, m);
    Eigen::Matrix3d J;
    // d/d sigma_r, d/d sigma_i act as multiplication by 1 and i on analytic maps
    J(0, 0) = d2.real();
    J(0, 1) = -d2.imag();
    J(0, 2) = 0.0;
    J(1, 0) = d2.imag();
    J(1, 1) = d2.real();
    J(1, 2) = sgn;
    J(2, 0) = dl.real();
    J(2, 1) = -dl.imag() - v;
    J(2, 2) = -si;
    Eigen::Vector3d step = J.partialPivLu().solve(F);
    sr -= step(0);
    si -= step(1);
    v -= step(2);
  }
  if (!converged) throw ConvergenceError("saddle Newton failed in 50 iterations");
  if (!(si > 0.0)) throw InvalidSaddleError("saddle left the upper half plane");

  SaddlePoint sp;
  sp.sigma = Complex(sr, si);
  sp.v = v;
  sp.lambda = dispersion(sp.sigma, beta, m);
  evalF(sr, si, v, F);
  sp.residual = F.cwiseAbs().maxCoeff();
  sp.direction = dir;
  return sp;
}

std::vector<SaddlePoint> spreading_speed_sweep(const std::vector<double>& betas,
                                               double m, Direction dir) {
  std::vector<SaddlePoint> out;
  Complex seed(1.0471975511965976, 0.5);
  for (double beta : betas) {
    SaddlePoint sp = spreading_speed(beta, m, seed, dir);
    seed = sp.sigma;
    out.push_back(sp);
  }
  return out;
}

UniformClassification classify_uniform(double beta, double m) {
  if (!(m > 0.0)) throw DomainError("classify_uniform requires m > 0");
  auto re = [&](double s) { return dispersion(Complex(s, 0.0), beta, m).real(); };

  // coarse scan, then golden-section, then Newton polish on the derivative
  const int coarse = 256;
  double best = 0.0, bestv = re(0.0);
  for (int i = 1; i <= coarse; ++i) {
    double s = M_PI * i / coarse;
    double v = re(s);
    if (v > bestv) {
      bestv = v;
      best = s;
    }
  }
  double a = std::max(0.0, best - M_PI / coarse);
  double b = std::min(M_PI, best + M_PI / coarse);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = re(x1), f2 = re(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = re(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = re(x1);
    }
  }
  double s = 0.5 * (a + b);
  for (int it = 0; it < 40; ++it) {
    double d1 = dispersion_dsigma(Complex(s, 0.0), beta, m).real();
    double d2 = dispersion_d2sigma(Complex(s, 0.0), beta, m).real();
    if (std::abs(d2) < 1e-14) break;
    double snew = s - d1 / d2;
    if (snew < 0.0 || snew > M_PI || !(d2 < 0.0)) break;  // keep the interior max
    if (std::abs(snew - s) < 1e-16) {
      s = snew;
      break;
    }
    s = snew;
  }
  double val = re(s);

  UniformClassification out;
  if (val > 1e-12) {
    out.verdict = Stability::Unstable;
    out.sigma_star = s;
    out.max_growth = val;
    return out;
  }
  // No interior growth.  sigma = 0 always gives lambda = 0 (mass shift), so
  // the verdict near threshold is decided by the quadratic coefficient of
  // Re lambda at the origin, m*(2-beta).
  double q2 = m * (2.0 - beta);
  out.sigma_star = 0.0;
  out.max_growth = 0.0;
  if (q2 > 1e-12)
    out.verdict = Stability::Unstable;
  else if (q2 < -1e-12)
    out.verdict = Stability::Stable;
  else
    out.verdict = Stability::Marginal;
  return out;
}

}  // namespace driftlab::spectral
