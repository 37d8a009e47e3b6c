#pragma once

// Scalar special functions used throughout the engine: standard normal
// pdf/cdf/quantile, regularized incomplete beta, and the Student-t cdf.

namespace predres {

double norm_pdf(double z);
double norm_cdf(double z);

// Inverse of norm_cdf. Rational approximation (Acklam) polished with one
// Halley step; absolute error below 1e-13 on (1e-300, 1 - 1e-16).
double norm_quantile(double p);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double betainc_reg(double a, double b, double x);

// CDF of the (unstandardized) Student-t with nu > 0 degrees of freedom.
double student_t_cdf(double t, double nu);

// log density of the 1-d standard Student-t at t.
double student_t_logpdf(double t, double nu);

}  // namespace predres
