#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace pickands {

struct EtaPoint {
  double eta = 0.0;
  double estimate = 0.0;
};

enum class FitInference {
  None,         ///< same-trace sweeps: errors are dependent, no standard errors
  NormalTheory  ///< independent runs per eta
};

/// OLS fit of estimate = h_T_hat - c_hat * eta^(alpha/2).
struct EtaScalingFit {
  double alpha = 0.0;
  double h_T_hat = 0.0;
  double c_hat = 0.0;
  std::vector<double> etas;
  std::vector<double> regressors;  ///< eta^(alpha/2)
  std::vector<double> residuals;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::optional<double> h_T_stderr;
  std::optional<double> c_stderr;
};

/// Needs at least two distinct etas; throws ArgumentError otherwise.
EtaScalingFit fit_eta_scaling(std::span<const EtaPoint> points, double alpha,
                              FitInference inference = FitInference::None);

/// h_T_hat - c_hat * eta^(alpha/2).
double predict(const EtaScalingFit& fit, double eta);

nlohmann::json to_json(const EtaScalingFit& fit);

}  // namespace pickands
