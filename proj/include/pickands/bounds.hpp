#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pickands {

/// Tuning constants of the truncation/discretization error calculus.
struct BoundParams {
  double gamma = 0.025;        ///< window growth: a_j = T (1 + gamma)^(j-1)
  double psi = 0.3;            ///< q_j = psi (1 + psi)^(-j) / 2
  double tau_base = 1.4;       ///< tau for the window around the origin
  double tau_j_base = 1.3;     ///< tau_j = tau_j_base * tau_j_growth^(j-1)
  double tau_j_growth = 1.005;
  double eps_scale = 1.0;      ///< multiplies both epsilon schedules
  std::size_t j_cap = 10000;
  double term_tol = 1e-16;     ///< relative truncation tolerance of the j-sums

  /// 0.005 + 0.025 (2 - alpha), times eps_scale.
  double eps_ub(double alpha) const { return eps_scale * (0.005 + 0.025 * (2.0 - alpha)); }
  double eps_lb(double alpha) const { return eps_ub(alpha) / 3.0; }
  double tau_j(std::size_t j) const;

  void validate() const;
};

/// Half-open window J with endpoints lo < hi.
struct Window {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double t_max() const noexcept;
};

/// a_1, ..., a_count with a_1 = T and ratio 1 + gamma.
std::vector<double> window_sequence(double T, double gamma, std::size_t count);

/// J_j = [a_j, a_{j+1}) for j >= 1.
Window truncation_window(std::size_t j, double T, double gamma);

/// 2 max(eta^alpha, t^alpha - (t - eta)^alpha), t the largest |t| in J.
double kappa_window(const Window& J, double alpha, double eta);

/// Chaining bound sqrt(2 pi / log 2) sum_{j>=2} 2^{3/2} r^{1-j} sqrt(log(2^{j+1} N_j^2)),
/// r = 1 / (2 eta^{alpha/2}), N_j = |J| r^{2j/alpha}. Requires r > 1.
double entropy_bound(double J_length, double alpha, double eta, double term_tol = 1e-16);

struct TailTerms {
  double integral_term = 0.0;
  double point_term = 0.0;
};

/// Event-independent terms of the auxiliary bound with m = kappa + entropy and
/// sigma^2 = 2 eta^alpha:
///   point    = (tau/eta) exp(-(log tau - m)^2 / (4 eta^alpha))
///   integral = (1/eta) sigma sqrt(2 pi) e^{m + sigma^2/2} Q((log tau - m - sigma^2)/sigma).
/// Requires tau > e^m.
TailTerms aux_tail_terms(double eta, double alpha, double kappa, double entropy, double tau);

/// Standard Gaussian upper tail.
double gaussian_upper_tail(double x);

/// Everything the auxiliary bound contributes for one window and one event.
struct AuxTerms {
  double kappa = 0.0;
  double entropy = 0.0;
  double integral_term = 0.0;
  double point_term = 0.0;
  double p_event_scaled = 0.0;  ///< (tau / eta) P(E)

  double total() const noexcept { return integral_term + point_term + p_event_scaled; }
};

/// Auxiliary bound on E[M_J / S_J^eta; E] given a bound on P(E).
AuxTerms aux_bound(const Window& J, double alpha, double eta, double tau, double p_event,
                   double term_tol = 1e-16);

/// Borell bound exp(-(a_j^{alpha/2} - sqrt(2) gamma^{alpha/2})^2 / (4 (1+gamma)^alpha))
/// on the probability that the sup of sqrt(2) B over J_j exceeds min |s|^alpha.
double p_truncation_event(std::size_t j, double alpha, double T, double gamma);

/// (2T/eta) exp(-[(eps - kappa_0)/(sqrt(2) eta^{alpha/2}) - 1]^2 / 2) clipped to [0, 1],
/// kappa_0 = max(eta^alpha, T^alpha - (T - eta)^alpha).
double p_discretization_event(double eps, double alpha, double T, double eta);

/// Borell bound on P(S_j^eta > eps eta q_j) for the lower-bound event.
double p_lower_window_event(std::size_t j, double eps, double alpha, double T, double eta,
                            const BoundParams& params);

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundResult {
  double value = 0.0;
  std::vector<BoundTerm> breakdown;
  std::size_t j_terms = 0;  ///< number of window terms summed
};

/// Upper bound on H_alpha from an estimate of the discretized truncated constant:
/// e^eps * estimate + discretization term + 2 * sum_j truncation term j.
BoundResult upper_bound(double estimate, double alpha, double T, double eta, const BoundParams& params);

/// Lower bound (estimate - correction) / (1 + eps).
BoundResult lower_bound(double estimate, double alpha, double T, double eta, const BoundParams& params);

struct PreconditionCheck {
  std::string direction;  ///< "upper" or "lower"
  bool ok = true;
  std::string detail;
};

struct IntervalReport {
  double alpha = 0.0;
  double T = 0.0;
  double eta = 0.0;
  double estimate = 0.0;
  std::optional<double> lb;
  std::optional<double> ub;
  std::vector<BoundTerm> breakdown;
  std::vector<PreconditionCheck> preconditions;
};

/// Both directions; a failing direction is recorded in `preconditions` and
/// leaves its bound empty. Never throws for precondition failures.
IntervalReport try_interval(double estimate, double alpha, double T, double eta, const BoundParams& params);

/// As try_interval, but throws PreconditionError when both directions fail.
IntervalReport interval(double estimate, double alpha, double T, double eta, const BoundParams& params);

nlohmann::json to_json(const IntervalReport& report);

}  // namespace pickands
