#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "driftlab/errors.hpp"

namespace driftlab::model {

using Complex = std::complex<double>;

// Tolerated negative round-off in population values.
inline constexpr double kTolNeg = 1e-12;

enum class BiasKind { SelfIncitement, CompromiseBias, NeighborBias, LinearBias };

enum class Boundary { Zero, Periodic };

const char* bias_name(BiasKind k);
BiasKind bias_from_name(const std::string& name);

struct BiasModel {
  BiasKind kind = BiasKind::SelfIncitement;
  double beta = 0.0;
  int range = 1;  // lattice range of the linear bias term only

  void validate() const;
};

// Finite window of population masses P_n.  Sites outside the window are zero
// (Boundary::Zero, compactly supported data) or wrap around (Boundary::Periodic).
struct LatticeState {
  std::vector<double> values;
  long origin_index = 0;   // lattice index of values[0]
  double frame_shift = 0.0;  // cumulative comoving-frame displacement
  Boundary boundary = Boundary::Zero;

  long size() const { return static_cast<long>(values.size()); }
  // Population at absolute lattice index n.
  double at(long n) const;
  double total_mass() const;
  double first_moment() const;   // sum of n * P_n, absolute indices
  double mean_opinion() const;   // first_moment / total_mass
  double max_abs() const;
  long argmax() const;           // absolute index of the largest entry

  void validate() const;  // finiteness and negativity check
};

// Two-site party P_n = mass*alpha, P_{n+1} = mass*(1-alpha), zero elsewhere.
struct TwoSiteParty {
  long site = 0;
  double alpha = 0.0;  // alpha in [0,1]; alpha = 0 is a one-site party at site+1
  double mass = 1.0;

  LatticeState to_state(int pad = 8) const;
};

// Lattice vector field dP_n/dt for the chosen bias mechanism, aligned with
// state.values.  Every term telescopes, so the rates sum to zero on padded
// windows.
std::vector<double> rhs(const LatticeState& state, const BiasModel& bias);

struct MomentRates {
  double mass_rate;          // always 0
  double first_moment_rate;  // closed form per bias kind
};

// Analytic rates of total mass and first moment, hard-coded from the
// telescoped sums so tests can compare against sum(n * rhs_n) independently.
MomentRates moment_rates(const LatticeState& state, const BiasModel& bias);

// Growth rate of the mode exp(i sigma n + lambda t) about P == m.
//
// The literature states this relation in two variants differing in the
// imaginary coefficient (beta sin sigma vs 2 beta sin sigma).  Linearizing the
// lattice field about P == m gives m*(2+2beta) on the P_{n+1} coupling and
// hence the coefficient 2*beta; that derived value is used here and is
// cross-checked in the tests by numerically linearizing rhs on a periodic
// window and diagonalizing with discrete Fourier modes.
Complex dispersion(Complex sigma, double beta, double m);
Complex dispersion_dsigma(Complex sigma, double beta, double m);
Complex dispersion_d2sigma(Complex sigma, double beta, double m);

}  // namespace driftlab::model
