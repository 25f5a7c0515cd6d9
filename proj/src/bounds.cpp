#include "pickands/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pickands/errors.hpp"
#include "pickands/fgn.hpp"
#include "pickands/summation.hpp"

namespace pickands {

namespace {

constexpr std::size_t kEntropyTermCap = 100000;

/// t^alpha - (t - eta)^alpha without cancellation when eta << t.
double power_step(double t, double alpha, double eta) {
  if (!(t > eta)) return std::pow(t, alpha);
  return -std::pow(t, alpha) * std::expm1(alpha * std::log1p(-eta / t));
}

std::string describe(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

}  // namespace

double BoundParams::tau_j(std::size_t j) const {
  return tau_j_base * std::pow(tau_j_growth, static_cast<double>(j) - 1.0);
}

void BoundParams::validate() const {
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
  if (!(psi > 0.0)) throw ArgumentError("psi must be positive");
  if (!(tau_base > 1.0)) throw ArgumentError("tau must exceed 1");
  if (!(tau_j_base > 1.0) || !(tau_j_growth >= 1.0)) throw ArgumentError("tau_j schedule must exceed 1");
  if (!(eps_scale > 0.0)) throw ArgumentError("eps scale must be positive");
  if (j_cap == 0) throw ArgumentError("j_cap must be positive");
  if (!(term_tol > 0.0)) throw ArgumentError("term tolerance must be positive");
}

double Window::t_max() const noexcept { return std::max(std::abs(lo), std::abs(hi)); }

std::vector<double> window_sequence(double T, double gamma, std::size_t count) {
  std::vector<double> a(count);
  for (std::size_t j = 0; j < count; ++j) a[j] = T * std::pow(1.0 + gamma, static_cast<double>(j));
  return a;
}

Window truncation_window(std::size_t j, double T, double gamma) {
  if (j == 0) throw ArgumentError("truncation windows are numbered from 1");
  const double a = T * std::pow(1.0 + gamma, static_cast<double>(j) - 1.0);
  return {a, a * (1.0 + gamma)};
}

double kappa_window(const Window& J, double alpha, double eta) {
  return 2.0 * std::max(std::pow(eta, alpha), power_step(J.t_max(), alpha, eta));
}

double entropy_bound(double J_length, double alpha, double eta, double term_tol) {
  validate_alpha(alpha);
  if (!(J_length > 0.0)) throw ArgumentError("window length must be positive");
  const double r = 1.0 / (2.0 * std::pow(eta, alpha / 2.0));
  if (!(r > 1.0)) {
    throw PreconditionError("entropy", "mesh too coarse for entropy bound (r = " + describe(r) + " <= 1)");
  }
  const double log_r = std::log(r);
  const double hurst = alpha / 2.0;
  const double log_len = std::log(J_length);
  CompensatedSum<double> sum;
  for (std::size_t j = 2; j < kEntropyTermCap; ++j) {
    const double jd = static_cast<double>(j);
    const double log_arg = (jd + 1.0) * std::numbers::ln2 + 2.0 * (log_len + jd / hurst * log_r);
    const double term = std::pow(2.0, 1.5) * std::exp((1.0 - jd) * log_r) * std::sqrt(std::max(0.0, log_arg));
    sum.add(term);
    if (term <= term_tol * sum.value()) break;
  }
  return std::sqrt(2.0 * std::numbers::pi / std::numbers::ln2) * sum.value();
}

double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

TailTerms aux_tail_terms(double eta, double alpha, double kappa, double entropy, double tau) {
  const double m = kappa + entropy;
  const double log_tau = std::log(tau);
  if (!(log_tau > m)) {
    throw PreconditionError("tau", "tau = " + describe(tau) + " must exceed e^(kappa + entropy) = " +
                                       describe(std::exp(m)));
  }
  const double eta_a = std::pow(eta, alpha);
  const double var = 2.0 * eta_a;
  const double sigma = std::sqrt(var);
  TailTerms out;
  out.point_term = tau / eta * std::exp(-(log_tau - m) * (log_tau - m) / (4.0 * eta_a));
  const double tail = gaussian_upper_tail((log_tau - m - var) / sigma);
  out.integral_term = tail == 0.0 ? 0.0
                                  : sigma * std::sqrt(2.0 * std::numbers::pi) * std::exp(m + var / 2.0) * tail / eta;
  return out;
}

AuxTerms aux_bound(const Window& J, double alpha, double eta, double tau, double p_event, double term_tol) {
  AuxTerms aux;
  aux.kappa = kappa_window(J, alpha, eta);
  aux.entropy = entropy_bound(J.length(), alpha, eta, term_tol);
  const TailTerms tails = aux_tail_terms(eta, alpha, aux.kappa, aux.entropy, tau);
  aux.integral_term = tails.integral_term;
  aux.point_term = tails.point_term;
  aux.p_event_scaled = tau / eta * p_event;
  return aux;
}

double p_truncation_event(std::size_t j, double alpha, double T, double gamma) {
  validate_alpha(alpha);
  if (!(T > gamma * std::pow(2.0, 1.0 / alpha))) {
    throw PreconditionError("truncation", "T too small for truncation bound (need T > gamma 2^(1/alpha))");
  }
  const double a = truncation_window(j, T, gamma).lo;
  const double excess = std::pow(a, alpha / 2.0) - std::numbers::sqrt2 * std::pow(gamma, alpha / 2.0);
  if (!(excess > 0.0)) {
    throw PreconditionError("truncation", "T too small for truncation bound at j = " + std::to_string(j));
  }
  return std::exp(-excess * excess / (4.0 * std::pow(1.0 + gamma, alpha)));
}

double p_discretization_event(double eps, double alpha, double T, double eta) {
  validate_alpha(alpha);
  const double kappa0 = std::max(std::pow(eta, alpha), power_step(T, alpha, eta));
  const double x = (eps - kappa0) / (std::numbers::sqrt2 * std::pow(eta, alpha / 2.0));
  if (!(eps > kappa0) || !(x > 1.0)) {
    throw PreconditionError("discretization", "epsilon " + describe(eps) +
                                                  " below discretization floor kappa_0 = " + describe(kappa0));
  }
  const double p = 2.0 * T / eta * std::exp(-0.5 * (x - 1.0) * (x - 1.0));
  return std::clamp(p, 0.0, 1.0);
}

double p_lower_window_event(std::size_t j, double eps, double alpha, double T, double eta,
                            const BoundParams& params) {
  const double a = truncation_window(j, T, params.gamma).lo;
  const double q = params.psi * std::pow(1.0 + params.psi, -static_cast<double>(j)) / 2.0;
  const double arg = std::log(eps * eta * q / (params.gamma * a)) + std::pow(a, alpha) -
                     std::numbers::sqrt2 * std::pow(params.gamma, alpha / 2.0) * std::pow(a, alpha / 2.0);
  if (!(arg > 0.0)) {
    throw PreconditionError("lower window " + std::to_string(j),
                            "T too small for the window bound (exponent argument " + describe(arg) + " <= 0)");
  }
  return std::exp(-arg * arg / (4.0 * std::pow(1.0 + params.gamma, alpha) * std::pow(a, alpha)));
}

BoundResult upper_bound(double estimate, double alpha, double T, double eta, const BoundParams& params) {
  validate_alpha(alpha);
  params.validate();
  const double eps = params.eps_ub(alpha);
  const double main = std::exp(eps) * estimate;

  const Window origin{-T, T};
  const double p_disc = p_discretization_event(eps, alpha, T, eta);
  const double disc = aux_bound(origin, alpha, eta, params.tau_base, p_disc, params.term_tol).total();

  CompensatedSum<double> trunc;
  std::size_t j = 1;
  for (; j <= params.j_cap; ++j) {
    const Window J = truncation_window(j, T, params.gamma);
    const double p = p_truncation_event(j, alpha, T, params.gamma);
    double term = 0.0;
    try {
      term = aux_bound(J, alpha, eta, params.tau_j(j), p, params.term_tol).total();
    } catch (const PreconditionError& e) {
      throw PreconditionError("truncation term j = " + std::to_string(j), e.what());
    }
    trunc.add(term);
    if (term <= params.term_tol * (main + disc + 2.0 * trunc.value())) break;
  }

  BoundResult result;
  result.j_terms = std::min(j, params.j_cap);
  const double trunc_sum = 2.0 * trunc.value();
  result.breakdown = {{"ub_main", main}, {"ub_disc", disc}, {"ub_trunc_sum", trunc_sum}};
  result.value = main + disc + trunc_sum;
  return result;
}

BoundResult lower_bound(double estimate, double alpha, double T, double eta, const BoundParams& params) {
  validate_alpha(alpha);
  params.validate();
  const double eps = params.eps_lb(alpha);

  CompensatedSum<double> p_sum;
  std::size_t j = 1;
  for (; j <= params.j_cap; ++j) {
    const double term = p_lower_window_event(j, eps, alpha, T, eta, params);
    p_sum.add(term);
    if (term <= params.term_tol * p_sum.value()) break;
  }
  const double p_event = std::min(1.0, 2.0 * p_sum.value());

  const Window origin{-T, T};
  const double correction = aux_bound(origin, alpha, eta, params.tau_base, p_event, params.term_tol).total();

  BoundResult result;
  result.j_terms = std::min(j, params.j_cap);
  const double main = estimate / (1.0 + eps);
  const double corr = correction / (1.0 + eps);
  result.breakdown = {{"lb_main", main}, {"lb_correction", corr}};
  result.value = main - corr;
  return result;
}

IntervalReport try_interval(double estimate, double alpha, double T, double eta, const BoundParams& params) {
  IntervalReport report;
  report.alpha = alpha;
  report.T = T;
  report.eta = eta;
  report.estimate = estimate;

  const auto attempt = [&](const char* direction, auto&& compute, std::optional<double>& slot) {
    PreconditionCheck check{direction, true, ""};
    try {
      BoundResult r = compute();
      slot = r.value;
      report.breakdown.insert(report.breakdown.end(), r.breakdown.begin(), r.breakdown.end());
    } catch (const PreconditionError& e) {
      check.ok = false;
      check.detail = e.what();
    }
    report.preconditions.push_back(std::move(check));
  };
  attempt("upper", [&] { return upper_bound(estimate, alpha, T, eta, params); }, report.ub);
  attempt("lower", [&] { return lower_bound(estimate, alpha, T, eta, params); }, report.lb);
  return report;
}

IntervalReport interval(double estimate, double alpha, double T, double eta, const BoundParams& params) {
  IntervalReport report = try_interval(estimate, alpha, T, eta, params);
  if (!report.lb && !report.ub) {
    throw PreconditionError("interval", "both directions failed: " + report.preconditions[0].detail + "; " +
                                            report.preconditions[1].detail);
  }
  return report;
}

nlohmann::json to_json(const IntervalReport& report) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["T"] = report.T;
  j["eta"] = report.eta;
  j["estimate"] = report.estimate;
  j["lower_bound"] = report.lb ? nlohmann::json(*report.lb) : nlohmann::json(nullptr);
  j["upper_bound"] = report.ub ? nlohmann::json(*report.ub) : nlohmann::json(nullptr);
  auto& terms = j["breakdown"] = nlohmann::json::object();
  for (const auto& t : report.breakdown) terms[t.name] = t.value;
  auto& checks = j["preconditions"] = nlohmann::json::array();
  for (const auto& c : report.preconditions) {
    checks.push_back({{"direction", c.direction}, {"ok", c.ok}, {"detail", c.detail}});
  }
  return j;
}

}  // namespace pickands
