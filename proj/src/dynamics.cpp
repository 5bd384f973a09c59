#include "driftlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driftlab::dynamics {

namespace {

using model::Boundary;

long stencil_margin(const BiasModel& bias) {
  return std::max<long>(2, bias.kind == model::BiasKind::LinearBias ? bias.range : 2);
}

// Keep a zero-ish buffer at both window ends so all stencil reads resolve.
void ensure_padding(LatticeState& s, const BiasModel& bias) {
  if (s.boundary == Boundary::Periodic) return;
  const long margin = stencil_margin(bias);
  auto needs = [&](bool front) {
    for (long k = 0; k < margin; ++k) {
      double v = front ? s.values[static_cast<size_t>(k)]
                       : s.values[s.values.size() - 1 - static_cast<size_t>(k)];
      if (std::abs(v) > 1e-14) return true;
    }
    return false;
  };
  const long pad = margin + 14;
  if (needs(true)) {
    s.values.insert(s.values.begin(), static_cast<size_t>(pad), 0.0);
    s.origin_index -= pad;
  }
  if (needs(false)) s.values.insert(s.values.end(), static_cast<size_t>(pad), 0.0);
}

void trim_window(LatticeState& s) {
  const double thr = 1e-16;
  const long keep = 10;
  long lo = 0, hi = s.size() - 1;
  while (lo < hi && std::abs(s.values[static_cast<size_t>(lo)]) < thr) ++lo;
  while (hi > lo && std::abs(s.values[static_cast<size_t>(hi)]) < thr) --hi;
  lo = std::max<long>(0, lo - keep);
  hi = std::min<long>(s.size() - 1, hi + keep);
  if (lo > 0 || hi < s.size() - 1) {
    std::vector<double> v(s.values.begin() + lo, s.values.begin() + hi + 1);
    s.values.swap(v);
    s.origin_index += lo;
  }
}

// Integer recentering of the peak onto comoving index 0.
void recenter_on_peak(LatticeState& s) {
  long p = s.argmax();
  if (p == 0) return;
  if (s.boundary == Boundary::Periodic) {
    long w = s.size();
    long i = p - s.origin_index;
    std::rotate(s.values.begin(), s.values.begin() + i, s.values.end());
    // peak value now sits at values[0]; relabel so its index is 0
    long shift = p;
    (void)w;
    s.origin_index = 0;
    s.frame_shift += static_cast<double>(shift);
  } else {
    s.origin_index -= p;
    s.frame_shift += static_cast<double>(p);
  }
}

struct Stepper {
  const BiasModel& bias;
  std::vector<double> k1, k2, k3, k4, k5, k6, tmp;

  std::vector<double> eval(const LatticeState& proto, const std::vector<double>& y) {
    LatticeState s = proto;
    s.values = y;
    return model::rhs(s, bias);
  }

  void rk4(LatticeState& s, double dt) {
    const std::vector<double> y0 = s.values;
    const size_t n = y0.size();
    k1 = eval(s, y0);
    tmp.resize(n);
    for (size_t i = 0; i < n; ++i) tmp[i] = y0[i] + 0.5 * dt * k1[i];
    k2 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = y0[i] + 0.5 * dt * k2[i];
    k3 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = y0[i] + dt * k3[i];
    k4 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i)
      s.values[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  // Cash-Karp embedded 4(5) pair; returns the error estimate scaled by tolerances.
  double rk45(LatticeState& s, double dt, double rtol, double atol) {
    static const double a2 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 3.0 / 10,
                        a42 = -9.0 / 10, a43 = 6.0 / 5, a51 = -11.0 / 54, a52 = 5.0 / 2,
                        a53 = -70.0 / 27, a54 = 35.0 / 27, a61 = 1631.0 / 55296,
                        a62 = 175.0 / 512, a63 = 575.0 / 13824, a64 = 44275.0 / 110592,
                        a65 = 253.0 / 4096;
    static const double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594,
                        b6 = 512.0 / 1771;
    static const double d1 = b1 - 2825.0 / 27648, d3 = b3 - 18575.0 / 48384,
                        d4 = b4 - 13525.0 / 55296, d5 = -277.0 / 14336, d6 = b6 - 0.25;
    const std::vector<double> y0 = s.values;
    const size_t n = y0.size();
    k1 = eval(s, y0);
    tmp.resize(n);
    for (size_t i = 0; i < n; ++i) tmp[i] = y0[i] + dt * a2 * k1[i];
    k2 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = y0[i] + dt * (a31 * k1[i] + a32 * k2[i]);
    k3 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i)
      tmp[i] = y0[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i)
      tmp[i] = y0[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = eval(s, tmp);
    for (size_t i = 0; i < n; ++i)
      tmp[i] = y0[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
    k6 = eval(s, tmp);
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double ynew = y0[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b6 * k6[i]);
      double e = dt * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
      double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(ynew));
      err = std::max(err, std::abs(e) / sc);
      s.values[i] = ynew;
    }
    return err;
  }
};

void append_snapshot(SpaceTimeRecord& rec, double t, const LatticeState& s) {
  rec.times.push_back(t);
  rec.snapshots.push_back(s);
  rec.peak_positions.push_back(peak_position(s) + s.frame_shift);
  double mass = s.total_mass();
  rec.mean_opinions.push_back(mass > 0.0 ? s.mean_opinion() + s.frame_shift
                                         : std::numeric_limits<double>::quiet_NaN());
  rec.mass_partitions.push_back(mass_partition(s));
}

}  // namespace

void IntegratorConfig::validate() const {
  if (dt < 0.0) throw DomainError("dt must be >= 0");
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("rtol/atol must be positive");
  if (method == Method::RK45 && rtol < 1e-12)
    throw DomainError("RK45 requires rtol >= 1e-12");
}

double default_dt(const BiasModel& bias, double mass_scale) {
  double m = std::max(mass_scale, 1e-12);
  return std::min(0.01, 0.1 / (m * (2.0 + 2.0 * bias.beta)));
}

double peak_position(const LatticeState& state) {
  long p = state.argmax();
  double ym = state.at(p - 1), y0 = state.at(p), yp = state.at(p + 1);
  double denom = ym - 2.0 * y0 + yp;
  double off = 0.0;
  if (std::abs(denom) > 1e-300) off = 0.5 * (ym - yp) / denom;
  if (std::abs(off) > 0.5) off = 0.0;  // flat or degenerate neighborhood
  return static_cast<double>(p) + off;
}

MassPartition mass_partition(const LatticeState& state) {
  if (state.total_mass() <= 0.0) throw DomainError("mass_partition of an empty state");
  long p = state.argmax();
  MassPartition out{0.0, 0.0, 0.0};
  for (long i = 0; i < state.size(); ++i) {
    long n = state.origin_index + i;
    double v = state.values[static_cast<size_t>(i)];
    if (std::labs(n - p) <= 5)
      out.party += v;
    else if (n > p)
      out.trailing += v;
    else
      out.leading += v;
  }
  return out;
}

SpaceTimeRecord integrate(LatticeState state, const BiasModel& bias,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  bias.validate();
  state.validate();

  double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(bias, state.max_abs());
  const double out_dt = cfg.out_dt > 0.0 ? cfg.out_dt : cfg.t_end / 200.0;

  SpaceTimeRecord rec;
  Stepper stepper{bias};
  if (cfg.frame == Frame::AdaptivePeak) recenter_on_peak(state);
  ensure_padding(state, bias);
  append_snapshot(rec, 0.0, state);

  double t = 0.0;
  double next_out = out_dt;
  while (t < cfg.t_end - 1e-12 * cfg.t_end) {
    double h = std::min(dt, cfg.t_end - t);
    if (cfg.method == Method::RK4) {
      stepper.rk4(state, h);
      t += h;
    } else {
      LatticeState trial = state;
      double err = stepper.rk45(trial, h, cfg.rtol, cfg.atol);
      if (err <= 1.0) {
        state = std::move(trial);
        t += h;
        dt = h * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
      } else {
        dt = h * std::max(0.1, 0.9 * std::pow(err, -0.2));
        if (dt < 1e-14 * std::max(1.0, cfg.t_end))
          throw StiffnessError("adaptive step underflow");
        continue;
      }
    }
    if (state.max_abs() > 1e12) throw DivergenceError("solution norm exceeded 1e12");
    if (cfg.frame == Frame::AdaptivePeak) {
      recenter_on_peak(state);
      trim_window(state);
    }
    ensure_padding(state, bias);
    if (t >= next_out - 1e-9 || t >= cfg.t_end - 1e-12 * cfg.t_end) {
      append_snapshot(rec, t, state);
      while (next_out <= t + 1e-9) next_out += out_dt;
    }
  }
  return rec;
}

double measure_drift_speed(const SpaceTimeRecord& record, double t0, double t1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (size_t i = 0; i < record.times.size(); ++i) {
    double t = record.times[i];
    if (t < t0 || t > t1) continue;
    double y = record.mean_opinions[i];
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  if (n < 3) throw EstimatorError("drift window holds fewer than 3 samples");
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw EstimatorError("degenerate drift window");
  return (n * sxy - sx * sy) / denom;
}

double selfsimilar_collapse(const SpaceTimeRecord& record,
                            const std::vector<double>& times) {
  if (times.size() < 2) throw EstimatorError("collapse needs at least two times");

  struct Profile {
    std::vector<double> x, y;  // ascending x
  };
  std::vector<Profile> profiles;
  for (double treq : times) {
    size_t best = 0;
    for (size_t i = 1; i < record.times.size(); ++i)
      if (std::abs(record.times[i] - treq) < std::abs(record.times[best] - treq))
        best = i;
    const LatticeState& s = record.snapshots[best];
    double t = std::max(record.times[best], 1e-12);
    double p = peak_position(s);
    Profile prof;
    double tail_mass = 0.0, ymax = 0.0;
    for (long i = 0; i < s.size(); ++i) {
      long n = s.origin_index + i;
      if (static_cast<double>(n) >= p - 5.0) continue;  // leading tail only
      double v = s.values[static_cast<size_t>(i)];
      prof.x.push_back((static_cast<double>(n) - p) / std::sqrt(t));
      prof.y.push_back(v);
      tail_mass += v;
      ymax = std::max(ymax, v);
    }
    if (tail_mass < 1e-6) throw EstimatorError("insufficient leading-tail mass");
    for (double& v : prof.y) v /= ymax;
    profiles.push_back(std::move(prof));
  }

  double xlo = -std::numeric_limits<double>::infinity();
  double xhi = std::numeric_limits<double>::infinity();
  for (const auto& p : profiles) {
    xlo = std::max(xlo, p.x.front());
    xhi = std::min(xhi, p.x.back());
  }
  if (!(xhi > xlo)) throw EstimatorError("no common abscissa overlap");

  auto interp = [](const Profile& p, double x) {
    auto it = std::lower_bound(p.x.begin(), p.x.end(), x);
    if (it == p.x.begin()) return p.y.front();
    if (it == p.x.end()) return p.y.back();
    size_t j = static_cast<size_t>(it - p.x.begin());
    double w = (x - p.x[j - 1]) / (p.x[j] - p.x[j - 1]);
    return (1.0 - w) * p.y[j - 1] + w * p.y[j];
  };

  double resid = 0.0;
  const int grid = 101;
  for (size_t a = 0; a + 1 < profiles.size(); ++a)
    for (size_t b = a + 1; b < profiles.size(); ++b)
      for (int g = 0; g < grid; ++g) {
        double x = xlo + (xhi - xlo) * g / (grid - 1);
        resid = std::max(resid, std::abs(interp(profiles[a], x) - interp(profiles[b], x)));
      }
  return resid;
}

}  // namespace driftlab::dynamics
