#pragma once

#include <cstdint>

namespace surprise {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Upper-tail probability of the chi-squared distribution with df degrees of
// freedom, via the regularized incomplete gamma function.  Relative error is
// about 1e-10 in the tested range (target was <= 1e-8 for x <= 200).
double chi2_sf(double x, std::int64_t df);

// Lower-tail (CDF) counterpart.
double chi2_cdf(double x, std::int64_t df);

// Smallest x with chi2_sf(x, df) <= p, by bisection.
double chi2_critical(double p, std::int64_t df);

// Upper tail of the standard normal.
double normal_sf(double z);

// Digamma psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

// log of the binomial coefficient C(n, k)
double log_choose(std::int64_t n, std::int64_t k);

// Asymptotic Kolmogorov distribution: P(D > d) for sample size n, with the
// Stephens small-sample correction.
double kolmogorov_sf(double d, std::size_t n);

// One-sample Kolmogorov critical distance at significance alpha.
double kolmogorov_critical(double alpha, std::size_t n);

}  // namespace surprise
