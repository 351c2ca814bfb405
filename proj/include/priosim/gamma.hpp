#ifndef PRIOSIM_GAMMA_HPP_
#define PRIOSIM_GAMMA_HPP_

namespace priosim {

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
// Series expansion for x < a+1, Lentz continued fraction otherwise.
double lower_regularized_gamma(double a, double x);
double upper_regularized_gamma(double a, double x);

double chi_square_cdf(double x, int dof);
// P(X > x) for X ~ chi-square with dof degrees of freedom.
double chi_square_tail(double x, int dof);

// Smooth, strictly decreasing surrogate for chi_square_tail built from the
// standard Chernoff deviation bounds for the chi-square distribution.
// Agrees with the exact tail in ranking (both strictly decreasing in x) and
// is cheap enough for per-round evaluation on constrained hardware.
double chi_square_tail_chernoff(double x, int dof);

}  // namespace priosim

#endif  // PRIOSIM_GAMMA_HPP_
