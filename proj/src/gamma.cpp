#include "priosim/gamma.hpp"

#include <cmath>
#include <limits>

namespace priosim {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

// P(a,x) via the power series, valid/fast for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) via modified Lentz continued fraction, for x >= a+1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
  if (std::isnan(a) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double upper_regularized_gamma(double a, double x) {
  if (std::isnan(a) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_cdf(double x, int dof) {
  return lower_regularized_gamma(0.5 * dof, 0.5 * x);
}

double chi_square_tail(double x, int dof) {
  return upper_regularized_gamma(0.5 * dof, 0.5 * x);
}

double chi_square_tail_chernoff(double x, int dof) {
  if (x <= 0.0) return 1.0;
  const double n = static_cast<double>(dof);
  // g(x) = ((x/n) e^{1-x/n})^{n/2}: the chi-square Chernoff exponent. It
  // bounds the upper tail for x > n and the lower tail for x < n.
  const double g = std::exp(0.5 * n * (std::log(x / n) + 1.0 - x / n));
  return x >= n ? 0.5 * g : 1.0 - 0.5 * g;
}

}  // namespace priosim
