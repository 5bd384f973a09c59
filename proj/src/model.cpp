#include "driftlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace driftlab::model {

const char* bias_name(BiasKind k) {
  switch (k) {
    case BiasKind::SelfIncitement: return "self-incitement";
    case BiasKind::CompromiseBias: return "compromise-bias";
    case BiasKind::NeighborBias: return "neighbor-bias";
    case BiasKind::LinearBias: return "linear-bias";
  }
  return "?";
}

BiasKind bias_from_name(const std::string& name) {
  if (name == "self-incitement") return BiasKind::SelfIncitement;
  if (name == "compromise-bias") return BiasKind::CompromiseBias;
  if (name == "neighbor-bias") return BiasKind::NeighborBias;
  if (name == "linear-bias") return BiasKind::LinearBias;
  throw DomainError("unknown bias kind: " + name);
}

void BiasModel::validate() const {
  if (!(beta >= 0.0)) throw DomainError("bias beta must be >= 0");
  if (range < 1) throw DomainError("linear bias range must be >= 1");
  if (kind == BiasKind::CompromiseBias && beta > 1.0)
    throw DomainError("compromise bias requires beta <= 1");
}

double LatticeState::at(long n) const {
  long i = n - origin_index;
  long w = size();
  if (boundary == Boundary::Periodic) {
    i %= w;
    if (i < 0) i += w;
    return values[static_cast<size_t>(i)];
  }
  if (i < 0 || i >= w) return 0.0;
  return values[static_cast<size_t>(i)];
}

double LatticeState::total_mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double LatticeState::first_moment() const {
  double s = 0.0;
  for (long i = 0; i < size(); ++i) s += static_cast<double>(origin_index + i) * values[i];
  return s;
}

double LatticeState::mean_opinion() const { return first_moment() / total_mass(); }

double LatticeState::max_abs() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

long LatticeState::argmax() const {
  long best = 0;
  for (long i = 1; i < size(); ++i)
    if (values[i] > values[best]) best = i;
  return origin_index + best;
}

void LatticeState::validate() const {
  double floor = -kTolNeg * std::max(1.0, max_abs());
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("non-finite population value");
    if (v < floor) throw DomainError("negative population beyond tolerance");
  }
}

LatticeState TwoSiteParty::to_state(int pad) const {
  if (alpha < 0.0 || alpha > 1.0) throw DomainError("two-site party alpha outside [0,1]");
  if (!(mass > 0.0)) throw DomainError("two-site party mass must be positive");
  LatticeState s;
  s.values.assign(static_cast<size_t>(2 * pad + 2), 0.0);
  s.origin_index = site - pad;
  s.values[static_cast<size_t>(pad)] = mass * alpha;
  s.values[static_cast<size_t>(pad + 1)] = mass * (1.0 - alpha);
  return s;
}

std::vector<double> rhs(const LatticeState& state, const BiasModel& bias) {
  state.validate();
  bias.validate();
  const long w = state.size();
  const long o = state.origin_index;
  const double beta = bias.beta;
  std::vector<double> out(static_cast<size_t>(w));

  auto P = [&](long n) { return state.at(n); };

  for (long i = 0; i < w; ++i) {
    long n = o + i;
    double r;
    switch (bias.kind) {
      case BiasKind::CompromiseBias:
        r = (2.0 - beta) * P(n + 1) * P(n - 1) - (1.0 - beta) * P(n) * P(n + 2) -
            P(n) * P(n - 2);
        break;
      case BiasKind::SelfIncitement:
        r = 2.0 * P(n + 1) * P(n - 1) - P(n) * (P(n + 2) + P(n - 2)) +
            beta * (P(n + 1) * P(n + 1) - P(n) * P(n));
        break;
      case BiasKind::NeighborBias:
        r = 2.0 * P(n + 1) * P(n - 1) - P(n) * (P(n + 2) + P(n - 2)) +
            beta * (P(n + 1) * P(n) - P(n) * P(n - 1));
        break;
      case BiasKind::LinearBias:
        r = 2.0 * P(n + 1) * P(n - 1) - P(n) * (P(n + 2) + P(n - 2)) +
            beta * (P(n + bias.range) - P(n)) / static_cast<double>(bias.range);
        break;
      default:
        r = 0.0;
    }
    out[static_cast<size_t>(i)] = r;
  }
  return out;
}

MomentRates moment_rates(const LatticeState& state, const BiasModel& bias) {
  state.validate();
  bias.validate();
  const double beta = bias.beta;
  auto P = [&](long n) { return state.at(n); };
  const long o = state.origin_index;
  const long w = state.size();

  double m1 = 0.0;
  switch (bias.kind) {
    case BiasKind::SelfIncitement:
      // sum n (P_{n+1}^2 - P_n^2) telescopes to -sum P_n^2
      for (long i = 0; i < w; ++i) m1 -= beta * P(o + i) * P(o + i);
      break;
    case BiasKind::NeighborBias:
      for (long i = 0; i < w; ++i) m1 -= beta * P(o + i) * P(o + i + 1);
      break;
    case BiasKind::CompromiseBias:
      for (long i = 0; i < w; ++i) m1 -= beta * P(o + i) * P(o + i + 2);
      break;
    case BiasKind::LinearBias:
      m1 = -beta * state.total_mass();
      break;
  }
  return MomentRates{0.0, m1};
}

Complex dispersion(Complex sigma, double beta, double m) {
  using namespace std::complex_literals;
  return m * (-2.0 * std::cos(2.0 * sigma) + (4.0 + 2.0 * beta) * std::cos(sigma) -
              (2.0 + 2.0 * beta) + 2.0i * beta * std::sin(sigma));
}

Complex dispersion_dsigma(Complex sigma, double beta, double m) {
  using namespace std::complex_literals;
  return m * (4.0 * std::sin(2.0 * sigma) - (4.0 + 2.0 * beta) * std::sin(sigma) +
              2.0i * beta * std::cos(sigma));
}

Complex dispersion_d2sigma(Complex sigma, double beta, double m) {
  using namespace std::complex_literals;
  return m * (8.0 * std::cos(2.0 * sigma) - (4.0 + 2.0 * beta) * std::cos(sigma) -
              2.0i * beta * std::sin(sigma));
}

}  // namespace driftlab::model
