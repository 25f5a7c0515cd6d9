#include "pickands/identity.hpp"

#include <cmath>

#include "pickands/errors.hpp"
#include "pickands/summation.hpp"

namespace pickands {

namespace {

constexpr double kIntegrandFloor = 1e-12;
constexpr double kPanelTolerance = 1e-14;
constexpr int kMaxDepth = 40;

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth >= kMaxDepth || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

}  // namespace

double identity_integrand(double y, double eta) {
  const double e2 = eta * eta;
  // Summand exp(-eta^2 (k - y/2)^2) drops below 1e-18 of its peak once
  // |k - y/2| > sqrt(18 log 10) / eta.
  const double reach = std::ceil(std::sqrt(18.0 * std::log(10.0)) / eta) + 1.0;
  const double centre = std::round(y / 2.0);
  CompensatedSum<double> sum;
  for (double k = centre - reach; k <= centre + reach; k += 1.0) {
    const double d = k - y / 2.0;
    sum.add(std::exp(-e2 * d * d));
  }
  return std::exp(-e2 * y * y / 4.0) / sum.value();
}

IdentityCheck alpha2_identity_integral(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("eta must be positive");
  const auto f = [eta](double y) { return identity_integrand(y, eta); };

  // The integrand is even in y. Integrate over [0, inf) in panels of width
  // 1/eta until it falls below the floor.
  const double width = 1.0 / eta;
  CompensatedSum<double> half;
  double a = 0.0;
  double fa = f(a);
  for (;;) {
    const double b = a + width;
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    half.add(adaptive_simpson(f, a, b, fa, fm, fb, whole, kPanelTolerance, 0));
    a = b;
    fa = fb;
    if (fb < kIntegrandFloor) break;
  }
  IdentityCheck out;
  out.eta = eta;
  out.value = 2.0 * half.value();
  out.abs_error = std::abs(out.value - 2.0);
  return out;
}

}  // namespace pickands
