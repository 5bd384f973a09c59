#pragma once
#include <array>
#include <utility>
#include <vector>

#include "driftlab/model.hpp"

namespace driftlab::dynamics {

using model::BiasModel;
using model::LatticeState;

enum class Method { RK4, RK45 };
enum class Frame { Fixed, AdaptivePeak };

struct IntegratorConfig {
  double dt = 0.0;  // 0 selects min(0.01, 0.1/(m*(2+2beta)))
  double t_end = 10.0;
  Method method = Method::RK4;
  double rtol = 1e-8;
  double atol = 1e-10;
  Frame frame = Frame::Fixed;
  double out_dt = 0.0;  // snapshot cadence; 0 selects t_end/200

  void validate() const;
};

// party / trailing / leading split of the total mass, peak +- 5 sites
struct MassPartition {
  double party;
  double trailing;  // sites at higher opinion than the party window
  double leading;   // remainder (lower opinion, ahead of the leftward drift)
};

struct SpaceTimeRecord {
  std::vector<double> times;
  std::vector<LatticeState> snapshots;
  std::vector<double> peak_positions;  // parabolically refined, lab frame
  std::vector<double> mean_opinions;   // lab frame
  std::vector<MassPartition> mass_partitions;
};

double default_dt(const BiasModel& bias, double mass_scale);

// Sub-site peak position: argmax refined by a 3-point parabolic fit.
double peak_position(const LatticeState& state);

MassPartition mass_partition(const LatticeState& state);

SpaceTimeRecord integrate(LatticeState state, const BiasModel& bias,
                          const IntegratorConfig& cfg);

// Least-squares slope of the mean opinion over the time window [t0, t1].
double measure_drift_speed(const SpaceTimeRecord& record, double t0, double t1);

// Collapse check of the leading-edge profile under the x * t^{-1/2} rescaling:
// snapshots nearest the requested times are normalized, interpolated onto a
// shared abscissa and compared; returns the largest pairwise sup discrepancy.
double selfsimilar_collapse(const SpaceTimeRecord& record,
                            const std::vector<double>& times);

}  // namespace driftlab::dynamics
