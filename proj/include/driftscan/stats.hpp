#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace driftscan {

struct stats_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Ordinary least-squares fit of a series against x = 0, 1, ..., k-1,
/// with a two-sided t-test on the slope coefficient (k-2 degrees of
/// freedom). Degenerate fits are pinned: a perfectly collinear series
/// with nonzero slope has p = 0, a constant series has slope = 0, p = 1.
struct RegressionResult {
  double slope = 0.0;
  double p_value = 1.0;
  std::size_t k = 0;
};

namespace detail {

// Continued-fraction evaluation for the regularized incomplete beta
// function (Lentz's method).
inline double beta_cont_frac(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// CDF of Student's t distribution with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
  if (df <= 0.0) throw stats_error("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * detail::regularized_incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

inline RegressionResult slope_test(std::span<const double> values) {
  const std::size_t k = values.size();
  if (k < 2) throw stats_error("slope_test: need at least 2 points");

  const double n = static_cast<double>(k);
  double mean_x = (n - 1.0) / 2.0;
  double mean_y = 0.0;
  for (double y : values) mean_y += y;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    const double dy = values[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  RegressionResult r;
  r.k = k;

  constexpr double tiny = 1e-20;
  if (syy <= tiny) {  // constant series
    r.slope = 0.0;
    r.p_value = 1.0;
    return r;
  }

  r.slope = sxy / sxx;
  const double sse = syy - sxy * sxy / sxx;  // residual sum of squares

  if (k == 2 || sse <= tiny) {  // perfect fit
    r.p_value = r.slope == 0.0 ? 1.0 : 0.0;
    return r;
  }

  const double df = n - 2.0;
  const double se = std::sqrt(sse / df / sxx);
  const double t = r.slope / se;
  r.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
  if (r.p_value < 0.0) r.p_value = 0.0;
  if (r.p_value > 1.0) r.p_value = 1.0;
  return r;
}

}  // namespace driftscan
