#pragma once

// Special functions used by the recomposition, fitting and inference code.

namespace sej::special {

// Standard normal CDF via the complementary error function.
double normal_cdf(double z);
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF at x.
double beta_cdf(double x, double a, double b);

// Inverse of beta_cdf in x.
double beta_quantile(double p, double a, double b);

double beta_pdf(double x, double a, double b);

// Quantile of the standard Student-t distribution with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

}  // namespace sej::special
