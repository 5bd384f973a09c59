#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "driftlab/model.hpp"
#include "driftlab/spectral.hpp"

using namespace driftlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent saddle oracle: the spreading speed is the minimum over
// Im sigma > 0 of max over Re sigma of Re lambda(sigma) / Im sigma; locate it
// by a coarse 400x400 grid scan plus local refinement.
double grid_oracle_speed(double beta, double m) {
  auto objective = [&](double sr, double si) {
    return model::dispersion({sr, si}, beta, m).real() / si;
  };
  const int n = 400;
  double best_si = 0.0, best_val = 0.0;
  for (int j = 1; j <= n; ++j) {
    double si = 1.5 * j / n;
    double inner = -1e300;
    for (int i = 0; i <= n; ++i) {
      double sr = kPi * i / n;
      inner = std::max(inner, objective(sr, si));
    }
    if (j == 1 || inner < best_val) {
      best_val = inner;
      best_si = si;
    }
  }
  // local refinement of min_si max_sr around the coarse optimum
  double lo = std::max(1e-4, best_si - 2.0 * 1.5 / n);
  double hi = best_si + 2.0 * 1.5 / n;
  auto inner_max = [&](double si) {
    double v = -1e300;
    for (int i = 0; i <= 4000; ++i)
      v = std::max(v, objective(kPi * i / 4000.0, si));
    return v;
  };
  for (int it = 0; it < 60; ++it) {
    double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (inner_max(a) < inner_max(b))
      hi = b;
    else
      lo = a;
  }
  return inner_max(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("spreading speed matches the grid-search oracle at beta = 0") {
  auto sp = spectral::spreading_speed(0.0, 1.0);
  double oracle = grid_oracle_speed(0.0, 1.0);
  CHECK(std::abs(sp.v - oracle) < 1e-4);
  CHECK(sp.sigma.imag() > 0.0);
  CHECK(sp.residual < 1e-10);
}

TEST_CASE("spreading speed matches the grid oracle at beta = 0.8") {
  auto sp = spectral::spreading_speed(0.8, 1.0);
  CHECK(std::abs(sp.v - grid_oracle_speed(0.8, 1.0)) < 1e-4);
}

TEST_CASE("spreading speed is exactly linear in m") {
  for (double beta : {0.0, 0.5, 1.2}) {
    auto s1 = spectral::spreading_speed(beta, 1.0);
    auto s3 = spectral::spreading_speed(beta, 3.0);
    CHECK(std::abs(s3.v - 3.0 * s1.v) < 1e-9 * (1.0 + std::abs(s1.v)));
    CHECK(std::abs(s3.sigma - s1.sigma) < 1e-9);
  }
}

TEST_CASE("leftward speed converges to the drift-dominated band edge") {
  // Under bias the left-moving envelope is governed by the long-wave drift,
  // giving v_left = 2 beta m; the right speed is far larger.
  for (double m : {1.0, 2.0}) {
    auto l = spectral::spreading_speed(0.5, m, {kPi / 3.0, 0.5},
                                       spectral::Direction::Left);
    CHECK(std::abs(l.v - 2.0 * 0.5 * m) < 1e-8);
    auto r = spectral::spreading_speed(0.5, m, {kPi / 3.0, 0.5},
                                       spectral::Direction::Right);
    CHECK(r.v > l.v);
  }
}

TEST_CASE("sweep continues the saddle smoothly in beta") {
  std::vector<double> betas;
  for (int i = 0; i <= 38; ++i) betas.push_back(0.05 * i);
  auto pts = spectral::spreading_speed_sweep(betas, 1.0,
                                             spectral::Direction::Right);
  REQUIRE(pts.size() == betas.size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(std::abs(pts[i].v - pts[i - 1].v) < 0.5);
    CHECK(pts[i].residual < 1e-9);
    CHECK(pts[i].sigma.imag() > 0.0);
  }
  // deterministic: re-running the sweep reproduces the values bit-for-bit
  auto again = spectral::spreading_speed_sweep(betas, 1.0,
                                               spectral::Direction::Right);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].v == again[i].v);
    CHECK(pts[i].sigma == again[i].sigma);
  }
}

TEST_CASE("classify_uniform reproduces the stability threshold") {
  auto base = spectral::classify_uniform(0.0, 1.0);
  CHECK(base.verdict == spectral::Stability::Unstable);
  CHECK(std::abs(base.sigma_star - kPi / 3.0) <= 1e-8);
  CHECK(std::abs(base.max_growth - 1.0) <= 1e-10);
  for (double beta : {0.5, 1.0, 1.9})
    CHECK(spectral::classify_uniform(beta, 1.0).verdict ==
          spectral::Stability::Unstable);
  for (double beta : {2.0, 2.5})
    CHECK(spectral::classify_uniform(beta, 1.0).verdict !=
          spectral::Stability::Unstable);
}

TEST_CASE("growth maximum scales with m") {
  auto a = spectral::classify_uniform(0.3, 1.0);
  auto b = spectral::classify_uniform(0.3, 2.5);
  CHECK(std::abs(b.max_growth - 2.5 * a.max_growth) < 1e-10);
  CHECK(std::abs(b.sigma_star - a.sigma_star) < 1e-8);
}
