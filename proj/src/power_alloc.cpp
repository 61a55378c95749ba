#include "uavsec/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavsec/geometry.hpp"

namespace uavsec {

double power_for_dual(double alpha, double beta, double lambda, double peak) {
  if (alpha <= beta) return 0.0;
  if (lambda <= 0.0) return peak;
  const double half_diff = 0.5 / beta - 0.5 / alpha;
  const double half_sum = 0.5 / beta + 0.5 / alpha;
  const double b = (1.0 / beta - 1.0 / alpha) / (lambda * std::numbers::ln2);
  // sqrt(half_diff^2 + b) - half_sum, rewritten to avoid cancellation
  // (half_sum^2 - half_diff^2 = 1 / (alpha beta)).
  const double p_hat = (b - 1.0 / (alpha * beta)) / (std::sqrt(half_diff * half_diff + b) + half_sum);
  return std::min(std::max(p_hat, 0.0), peak);
}

namespace {

double mean_power(std::span<const double> alpha, std::span<const double> beta, double lambda,
                  double peak, std::vector<double>* out) {
  double sum = 0.0;
  for (std::size_t n = 0; n < alpha.size(); ++n) {
    const double p = power_for_dual(alpha[n], beta[n], lambda, peak);
    if (out) (*out)[n] = p;
    sum += p;
  }
  return sum / static_cast<double>(alpha.size());
}

}  // namespace

PowerDual optimize_power(std::span<const double> alpha, std::span<const double> beta,
                         double avg_power, double peak_power) {
  if (alpha.size() != beta.size() || alpha.empty())
    throw std::invalid_argument("optimize_power: alpha and beta must be non-empty and equal length");

  PowerDual out;
  out.schedule.p.assign(alpha.size(), 0.0);
  const double tol = kPowerRelTol * avg_power;

  const double at_zero = mean_power(alpha, beta, 0.0, peak_power, &out.schedule.p);
  if (at_zero <= avg_power) {
    out.avg_used = at_zero;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (mean_power(alpha, beta, hi, peak_power, nullptr) > avg_power) {
    lo = hi;
    hi *= 2.0;
    ++out.iterations;
  }

  double used = mean_power(alpha, beta, hi, peak_power, nullptr);
  for (std::size_t it = 0; it < 4096; ++it) {
    if (hi - lo < kLambdaTol * hi || avg_power - used < tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = mean_power(alpha, beta, mid, peak_power, nullptr);
    if (m > avg_power) {
      lo = mid;
    } else {
      hi = mid;
      used = m;
    }
    ++out.iterations;
  }

  out.lambda = hi;
  out.avg_used = mean_power(alpha, beta, hi, peak_power, &out.schedule.p);
  return out;
}

PowerDual optimize_power(const Trajectory& traj, const Scenario& scenario) {
  const WorstCaseGeometry g = rate_coefficients(traj, scenario);
  return optimize_power(g.alpha, g.beta, scenario.avg_power, scenario.peak_power);
}

double power_objective(std::span<const double> alpha, std::span<const double> beta,
                       std::span<const double> powers) {
  double sum = 0.0;
  for (std::size_t n = 0; n < powers.size(); ++n)
    sum += std::log2(1.0 + alpha[n] * powers[n]) - std::log2(1.0 + beta[n] * powers[n]);
  return sum;
}

}  // namespace uavsec
