#pragma once

namespace qpmix {

/// log B(a, b), accurate when one argument is large and the other small.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b). Throws DomainError for a, b <= 0 or
/// x outside [0, 1].
double reg_inc_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(s, x).
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
double reg_inc_gamma_upper(double s, double x);

/// Survival function of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double stat, double df) { return reg_inc_gamma_upper(df / 2.0, stat / 2.0); }

}  // namespace qpmix
