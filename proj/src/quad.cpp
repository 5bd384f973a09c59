#include "driftlab/quad.hpp"

#include <cmath>

#include "driftlab/errors.hpp"

namespace driftlab::quad {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
  if (depth <= 0) throw QuadratureError("adaptive Simpson depth exhausted");
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  // pre-split into panels so symmetric integrands cannot fool the first
  // error estimate with coincidental zeros at the sample points
  const int panels = 16;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double pa = a + (b - a) * p / panels;
    double pb = a + (b - a) * (p + 1) / panels;
    double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
    double whole = simpson(fa, fm, fb, pb - pa);
    total += adapt(f, pa, pb, fa, fm, fb, whole, abs_tol / panels, max_depth);
  }
  return total;
}

}  // namespace driftlab::quad
