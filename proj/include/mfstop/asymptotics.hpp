#pragma once

// Large-n statistics near a root x of the mean field equation with slope
// parameter alpha = c f_t(r - c x), and exact finite-n probabilities.

#include <cmath>
#include <numbers>
#include <optional>

#include "mfstop/errors.hpp"
#include "mfstop/signal_model.hpp"

namespace mfstop {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// theta in (0, 1) with theta e^-theta = alpha e^-alpha.
inline double theta_of(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("theta_of needs alpha > 1");
  const double target = alpha * std::exp(-alpha);
  double lo = 0.0;
  double hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid * std::exp(-mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double kstar_crossing_limit(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("kstar_crossing_limit needs alpha > 1");
  return (1.0 - theta_of(alpha)) / (alpha - 1.0);
}

inline double expected_count_limit(double alpha) {
  if (!(alpha >= 0.0) || alpha == 1.0) throw DomainError("expected_count_limit needs alpha >= 0, alpha != 1");
  return std::exp(-alpha) / std::abs(1.0 - alpha);
}

inline double log_slope_gap(double alpha) { return 1.0 - alpha + std::log(alpha); }

inline double lower_bound_L(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("lower_bound_L needs alpha > 1");
  const double a0 = std::abs(log_slope_gap(alpha));
  const double tail = 1.0 - normal_cdf(std::sqrt(2.0 * a0));
  return std::exp(-alpha) / ((alpha - 1.0) * (1.0 + 2.0 * std::sqrt(2.0 / a0) * tail));
}

// Limit of the expected count in windows of half-width beta / sqrt(n) around x.
inline double window_expected_count(double alpha, double x, double beta) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("window_expected_count needs x in (0, 1)");
  if (!(beta >= 0.0)) throw DomainError("window_expected_count needs beta >= 0");
  const double limit = expected_count_limit(alpha);
  if (std::isinf(beta)) return limit;
  const double q = std::abs(alpha - 1.0) * beta / std::sqrt(x * (1.0 - x));
  return limit * (normal_cdf(q) - normal_cdf(-q));
}

struct AlphaStats {
  double alpha = 0.0;
  double a0 = 0.0;
  std::optional<double> theta;
  std::optional<double> kstar_crossing_limit;
  std::optional<double> expected_count_limit;
  std::optional<double> lower_bound_L;
};

inline AlphaStats alpha_stats(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
  AlphaStats s;
  s.alpha = alpha;
  s.a0 = log_slope_gap(alpha);
  if (alpha != 1.0) s.expected_count_limit = expected_count_limit(alpha);
  if (alpha > 1.0) {
    s.theta = theta_of(alpha);
    s.kstar_crossing_limit = kstar_crossing_limit(alpha);
    s.lower_bound_L = lower_bound_L(alpha);
  }
  return s;
}

namespace detail {

// log(p^m), with 0^0 = 1
inline double log_pow(double p, double m) {
  if (m == 0.0) return 0.0;
  if (p <= 0.0) return -INFINITY;
  return m * std::log(p);
}

inline double log_choose(Count n, Count k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace detail

// P(k in K) for n i.i.d. signals at time t: exactly k signals lie at or above
// the threshold for k-1 stopped agents and the rest lie strictly below the
// threshold for k. Left limits of the c.d.f. keep this exact for atoms.
inline double exact_prob_k_in_K(const SignalModel& model, const GameParams& params, double t, Count k) {
  const Count n = params.players();
  if (k < 0 || k > n) return 0.0;
  auto th = [&](Count j) { return params.r - params.c * static_cast<double>(j) / static_cast<double>(n); };
  if (k == 0) return std::exp(detail::log_pow(model.cdf_left(t, params.r), static_cast<double>(n)));
  const double below = model.cdf_left(t, th(k));
  const double above = 1.0 - model.cdf_left(t, th(k - 1));
  const double lp = detail::log_choose(n, k) + detail::log_pow(below, static_cast<double>(n - k)) +
                    detail::log_pow(above, static_cast<double>(k));
  return std::min(1.0, std::exp(lp));
}

// P(k in K*) = P(G(k) = k), a binomial probability.
inline double exact_prob_k_in_Kstar(const SignalModel& model, const GameParams& params, double t, Count k) {
  const Count n = params.players();
  if (k < 0 || k > n) return 0.0;
  const double th = params.r - params.c * static_cast<double>(k) / static_cast<double>(n);
  const double below = model.cdf_left(t, th);
  const double lp = detail::log_choose(n, k) + detail::log_pow(below, static_cast<double>(n - k)) +
                    detail::log_pow(1.0 - below, static_cast<double>(k));
  return std::min(1.0, std::exp(lp));
}

enum class SetSelector { K, K_star };

inline std::string to_string(SetSelector s) { return s == SetSelector::K ? "K" : "K_star"; }

// |x - k/n| < eps, compared on the count scale so that k/n landing exactly on
// the window edge is excluded regardless of how x - k/n rounds.
inline bool in_window(Count k, Count n, double x, double eps) {
  const double dn = static_cast<double>(n);
  return std::abs(x * dn - static_cast<double>(k)) < eps * dn;
}

// Expected number of members of K (or K*) with |x - k/n| < eps.
inline double exact_expected_count(const SignalModel& model, const GameParams& params, double t, Count n, double x,
                                   double eps, SetSelector set = SetSelector::K) {
  GameParams p = params;
  p.n = n;
  const double dn = static_cast<double>(n);
  const Count lo = std::max<Count>(0, static_cast<Count>(std::floor(dn * (x - eps))));
  const Count hi = std::min<Count>(n, static_cast<Count>(std::ceil(dn * (x + eps))));
  double sum = 0.0;
  for (Count k = lo; k <= hi; ++k) {
    if (!in_window(k, n, x, eps)) continue;
    sum += set == SetSelector::K ? exact_prob_k_in_K(model, p, t, k) : exact_prob_k_in_Kstar(model, p, t, k);
  }
  return sum;
}

}  // namespace mfstop
