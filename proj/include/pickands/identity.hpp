#pragma once

namespace pickands {

struct IdentityCheck {
  double eta = 0.0;
  double value = 0.0;
  double abs_error = 0.0;  ///< |value - 2|
};

/// Integrand 1 / sum_k exp(k y eta^2 - k^2 eta^2) of the alpha = 2 lattice
/// identity, evaluated as exp(-eta^2 y^2/4) / sum_k exp(-eta^2 (k - y/2)^2).
double identity_integrand(double y, double eta);

/// Deterministic quadrature of the integrand over the real line; the exact
/// value is 2 for every eta > 0.
IdentityCheck alpha2_identity_integral(double eta);

}  // namespace pickands
