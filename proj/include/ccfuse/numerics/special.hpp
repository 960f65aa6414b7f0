#pragma once

// Special functions used throughout: normal, chi-squared, gamma, beta and
// Student t distributions. All functions are pure and reentrant.

namespace ccfuse::numerics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log Γ(x) for x > 0 (Lanczos, g = 7). Does not touch global state.
double log_gamma(double x);
double log_beta(double a, double b);
// log of the binomial coefficient C(n, k); -inf when k is outside [0, n].
double log_choose(double n, double k);

double norm_pdf(double x);
double norm_log_pdf(double x);
double norm_cdf(double x);
// Upper tail 1 - Φ(x) without cancellation.
double norm_sf(double x);
// Inverse of norm_cdf. Returns -inf / +inf at p = 0 / 1; throws
// InvalidArgument outside [0, 1].
double norm_quantile(double p);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// Solves gamma_p(a, x) = p for x.
double gamma_p_inverse(double a, double p);

// c.d.f. of Gamma(shape, rate) at x.
double gamma_cdf(double x, double shape, double rate = 1.0);
double gamma_log_pdf(double x, double shape, double rate = 1.0);

// Chi-squared with df > 0 degrees of freedom (df need not be integral).
double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);
double chi2_quantile(double p, double df);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, double a, double b);

double t_log_pdf(double x, double df);
double t_cdf(double x, double df);
double t_quantile(double p, double df);

// log(exp(a) + exp(b)) with -inf handled.
double log_add_exp(double a, double b);

}  // namespace ccfuse::numerics
