#pragma once
#include <complex>
#include <vector>

#include "driftlab/model.hpp"

namespace driftlab::spectral {

using model::Complex;

// Direction of the envelope motion the speed refers to.  The party itself
// drifts toward lower opinion sites, which corresponds to Left here; under
// bias the two speeds differ.
enum class Direction { Right, Left };

struct SaddlePoint {
  Complex sigma;   // pinched saddle wavenumber, Im sigma > 0
  double v;        // envelope velocity in sites per unit time, >= 0
  Complex lambda;  // growth rate at the saddle
  double residual;
  Direction direction;
};

// Solves the pinched-saddle system
//   d lambda / d sigma = -i v   (Right)  /  +i v  (Left)
//   Re lambda(sigma)   = v * Im sigma
// for (Re sigma, Im sigma, v) by Newton iteration with the analytic
// derivative of the dispersion relation.
SaddlePoint spreading_speed(double beta, double m,
                            Complex seed = Complex(1.0471975511965976, 0.5),
                            Direction dir = Direction::Right);

// Sweep in beta, reusing each converged saddle as the seed for the next.
std::vector<SaddlePoint> spreading_speed_sweep(const std::vector<double>& betas,
                                               double m, Direction dir);

enum class Stability { Unstable, Marginal, Stable };

struct UniformClassification {
  Stability verdict;
  double sigma_star;   // argmax of Re lambda over [0, pi]
  double max_growth;
};

UniformClassification classify_uniform(double beta, double m);

}  // namespace driftlab::spectral
