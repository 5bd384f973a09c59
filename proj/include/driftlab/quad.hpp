#pragma once
#include <functional>

namespace driftlab::quad {

// Adaptive Simpson quadrature with absolute tolerance (default 1e-12).
// Throws QuadratureError when the recursion depth limit is hit before the
// local error estimates fall below tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, int max_depth = 48);

}  // namespace driftlab::quad
