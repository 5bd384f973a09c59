#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "driftlab/dynamics.hpp"
#include "driftlab/model.hpp"

using namespace driftlab;
using model::BiasKind;
using model::BiasModel;
using model::LatticeState;

namespace {

constexpr double kPi = 3.14159265358979323846;

LatticeState uniform_ring(int n, double m) {
  LatticeState s;
  s.values.assign(n, m);
  s.origin_index = 0;
  s.boundary = model::Boundary::Periodic;
  return s;
}

}  // namespace

TEST_CASE("uniform state stays uniform") {
  BiasModel bias{BiasKind::SelfIncitement, 0.8, 1};
  dynamics::IntegratorConfig cfg;
  cfg.t_end = 5.0;
  cfg.out_dt = 1.0;
  auto rec = dynamics::integrate(uniform_ring(30, 0.9), bias, cfg);
  for (const auto& st : rec.snapshots)
    for (double v : st.values) CHECK(v == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("mass is conserved for every bias kind") {
  const std::vector<std::pair<BiasKind, double>> cases = {
      {BiasKind::SelfIncitement, 0.6},
      {BiasKind::CompromiseBias, 0.6},
      {BiasKind::NeighborBias, 0.6},
      {BiasKind::LinearBias, 0.6}};
  for (const auto& [kind, beta] : cases) {
    BiasModel bias{kind, beta, 2};
    model::TwoSiteParty party{0, 0.5, 1.0};
    dynamics::IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 100.0;
    cfg.out_dt = 20.0;
    auto rec = dynamics::integrate(party.to_state(60), bias, cfg);
    double m0 = rec.snapshots.front().total_mass();
    for (const auto& st : rec.snapshots)
      CHECK(std::abs(st.total_mass() - m0) <= 1e-8 * m0);
  }
}

TEST_CASE("linearized growth matches the dispersion relation") {
  // Seed P = m + eps cos(sigma n) on a ring and compare the measured
  // exponential rate of the Fourier amplitude with Re lambda(sigma).
  const int N = 24;
  const double eps = 1e-6;
  for (double beta : {0.0, 1.0})
    for (int k : {2, 4, 6}) {  // sigma = pi/6, pi/3, pi/2
      double sigma = 2.0 * kPi * k / N;
      BiasModel bias{BiasKind::SelfIncitement, beta, 1};
      auto s = uniform_ring(N, 1.0);
      for (int n = 0; n < N; ++n) s.values[n] += eps * std::cos(sigma * n);
      dynamics::IntegratorConfig cfg;
      cfg.dt = 1e-3;
      cfg.t_end = 1.0;
      cfg.out_dt = 1.0;
      auto rec = dynamics::integrate(s, bias, cfg);
      auto amplitude = [&](const LatticeState& st) {
        double re = 0.0, im = 0.0;
        for (int n = 0; n < N; ++n) {
          re += (st.values[n] - 1.0) * std::cos(sigma * n);
          im += (st.values[n] - 1.0) * std::sin(sigma * n);
        }
        return std::sqrt(re * re + im * im);
      };
      double a0 = amplitude(rec.snapshots.front());
      double a1 = amplitude(rec.snapshots.back());
      double rate = std::log(a1 / a0) / (rec.times.back() - rec.times.front());
      double predicted = model::dispersion({sigma, 0.0}, beta, 1.0).real();
      CHECK(std::abs(rate - predicted) <= 0.01 * std::max(1.0, std::abs(predicted)));
    }
}

TEST_CASE("first-moment rate matches the analytic moment_rates") {
  BiasModel bias{BiasKind::SelfIncitement, 0.4, 1};
  model::TwoSiteParty party{0, 0.3, 1.5};
  auto s = party.to_state(20);
  dynamics::IntegratorConfig cfg;
  cfg.dt = 2e-4;
  cfg.t_end = 2e-4;  // single RK4 step
  cfg.out_dt = 2e-4;
  auto rec = dynamics::integrate(s, bias, cfg);
  double dm = (rec.snapshots.back().first_moment() -
               rec.snapshots.front().first_moment()) /
              (rec.times.back() - rec.times.front());
  double r0 = model::moment_rates(rec.snapshots.front(), bias).first_moment_rate;
  double r1 = model::moment_rates(rec.snapshots.back(), bias).first_moment_rate;
  CHECK(std::abs(dm - 0.5 * (r0 + r1)) < 1e-8);
}

TEST_CASE("fixed and peak-adaptive frames agree on lab-frame diagnostics") {
  BiasModel bias{BiasKind::SelfIncitement, 0.3, 1};
  model::TwoSiteParty party{0, 0.5, 1.0};
  dynamics::IntegratorConfig fixed;
  fixed.t_end = 10.0;
  fixed.out_dt = 1.0;
  auto adaptive = fixed;
  adaptive.frame = dynamics::Frame::AdaptivePeak;
  auto ra = dynamics::integrate(party.to_state(30), bias, fixed);
  auto rb = dynamics::integrate(party.to_state(30), bias, adaptive);
  REQUIRE(ra.times.size() == rb.times.size());
  for (std::size_t i = 0; i < ra.times.size(); ++i) {
    CHECK(std::abs(ra.mean_opinions[i] - rb.mean_opinions[i]) < 1e-10);
    CHECK(std::abs(ra.peak_positions[i] - rb.peak_positions[i]) < 1e-10);
    CHECK(std::abs(ra.mass_partitions[i].party - rb.mass_partitions[i].party) <
          1e-10);
  }
}

TEST_CASE("parabolic peak refinement finds the sub-site maximum") {
  LatticeState s;
  // values of -(x - 4.3)^2 + 10 on integer sites
  for (int n = 0; n <= 8; ++n)
    s.values.push_back(10.0 - (n - 4.3) * (n - 4.3));
  s.origin_index = 0;
  CHECK(dynamics::peak_position(s) == doctest::Approx(4.3).epsilon(1e-12));
}

TEST_CASE("measure_drift_speed recovers a linear mean-opinion trend") {
  dynamics::SpaceTimeRecord rec;
  for (int i = 0; i <= 100; ++i) {
    double t = 0.1 * i;
    rec.times.push_back(t);
    rec.mean_opinions.push_back(3.0 - 0.25 * t);
  }
  CHECK(dynamics::measure_drift_speed(rec, 2.0, 10.0) ==
        doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("small-beta party drifts at the predicted speed") {
  const double beta = 0.1;
  BiasModel bias{BiasKind::SelfIncitement, beta, 1};
  model::TwoSiteParty party{0, 0.5, 1.0};
  double pred = 2.0 * beta / kPi - 0.467 * std::pow(beta, 1.5);
  double period = 1.0 / pred;
  dynamics::IntegratorConfig cfg;
  cfg.t_end = 3.0 * period;
  cfg.out_dt = cfg.t_end / 600.0;
  auto rec = dynamics::integrate(party.to_state(12), bias, cfg);
  double v = -dynamics::measure_drift_speed(rec, period, cfg.t_end);
  CHECK(std::abs(v - pred) / pred < 0.05);
}

TEST_CASE("config validation rejects bad settings") {
  dynamics::IntegratorConfig cfg;
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.dt = -0.5;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("self-similar collapse of the leaky-party wake") {
  // Under the linear bias a party sheds mass into a diffusive tail whose
  // normalized profile collapses under the x t^{-1/2} rescaling.
  BiasModel bias{BiasKind::LinearBias, 0.6, 2};
  model::TwoSiteParty party{0, 0.5, 1.0};
  dynamics::IntegratorConfig cfg;
  cfg.t_end = 120.0;
  cfg.out_dt = 2.0;
  auto rec = dynamics::integrate(party.to_state(140), bias, cfg);
  double mismatch = dynamics::selfsimilar_collapse(rec, {60.0, 90.0, 120.0});
  CHECK(std::isfinite(mismatch));
  CHECK(mismatch < 0.25);
  // too few comparison times is rejected
  CHECK_THROWS_AS(dynamics::selfsimilar_collapse(rec, {60.0}), EstimatorError);
}

TEST_CASE("linear-bias party mass decays monotonically") {
  BiasModel bias{BiasKind::LinearBias, 0.6, 2};
  model::TwoSiteParty party{0, 0.5, 1.0};
  dynamics::IntegratorConfig cfg;
  cfg.t_end = 60.0;
  cfg.out_dt = 5.0;
  auto rec = dynamics::integrate(party.to_state(80), bias, cfg);
  for (std::size_t i = 1; i < rec.mass_partitions.size(); ++i)
    CHECK(rec.mass_partitions[i].party <=
          rec.mass_partitions[i - 1].party + 1e-12);
}
