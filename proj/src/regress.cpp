#include "pickands/regress.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pickands/errors.hpp"
#include "pickands/fgn.hpp"
#include "pickands/summation.hpp"

namespace pickands {

EtaScalingFit fit_eta_scaling(std::span<const EtaPoint> points, double alpha, FitInference inference) {
  validate_alpha(alpha);
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!(p.eta > 0.0)) throw ArgumentError("regression etas must be positive");
    distinct.insert(p.eta);
  }
  if (distinct.size() < 2) throw ArgumentError("regression needs at least two distinct eta values");

  EtaScalingFit fit;
  fit.alpha = alpha;
  fit.n_points = points.size();
  const double n = static_cast<double>(points.size());
  std::vector<double> y;
  for (const auto& p : points) {
    fit.etas.push_back(p.eta);
    fit.regressors.push_back(std::pow(p.eta, alpha / 2.0));
    y.push_back(p.estimate);
  }

  const double x_bar = compensated_total(fit.regressors) / n;
  const double y_bar = compensated_total(y) / n;
  CompensatedSum<double> sxx, sxy, syy;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = fit.regressors[i] - x_bar;
    const double dy = y[i] - y_bar;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  const double slope = sxy.value() / sxx.value();
  const double intercept = y_bar - slope * x_bar;
  fit.h_T_hat = intercept;
  fit.c_hat = -slope;

  CompensatedSum<double> sse;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - (intercept + slope * fit.regressors[i]);
    fit.residuals.push_back(r);
    sse.add(r * r);
  }
  fit.r_squared = syy.value() > 0.0 ? 1.0 - sse.value() / syy.value() : 1.0;

  if (inference == FitInference::NormalTheory && points.size() > 2) {
    const double s2 = sse.value() / (n - 2.0);
    fit.c_stderr = std::sqrt(s2 / sxx.value());
    fit.h_T_stderr = std::sqrt(s2 * (1.0 / n + x_bar * x_bar / sxx.value()));
  }
  return fit;
}

double predict(const EtaScalingFit& fit, double eta) {
  return fit.h_T_hat - fit.c_hat * std::pow(eta, fit.alpha / 2.0);
}

nlohmann::json to_json(const EtaScalingFit& fit) {
  nlohmann::json j;
  j["alpha"] = fit.alpha;
  j["h_T_hat"] = fit.h_T_hat;
  j["c_hat"] = fit.c_hat;
  j["r_squared"] = fit.r_squared;
  j["n_points"] = fit.n_points;
  auto& pts = j["points"] = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.etas.size(); ++i) {
    pts.push_back({{"eta", fit.etas[i]}, {"x", fit.regressors[i]}, {"residual", fit.residuals[i]}});
  }
  if (fit.h_T_stderr) j["h_T_stderr"] = *fit.h_T_stderr;
  if (fit.c_stderr) j["c_stderr"] = *fit.c_stderr;
  return j;
}

}  // namespace pickands
