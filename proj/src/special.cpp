#include "surprise/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace surprise {

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0 || std::isnan(a) || std::isnan(x)) {
        throw std::invalid_argument("gamma_p: requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0 || std::isnan(a) || std::isnan(x)) {
        throw std::invalid_argument("gamma_q: requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double x, std::int64_t df) {
    if (df < 1) throw std::invalid_argument("chi2_sf: df must be >= 1");
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("chi2_sf: x must be >= 0");
    if (x == 0.0) return 1.0;
    const double q = gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
    return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

double chi2_cdf(double x, std::int64_t df) {
    if (df < 1) throw std::invalid_argument("chi2_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    const double p = gamma_p(0.5 * static_cast<double>(df), 0.5 * x);
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double chi2_critical(double p, std::int64_t df) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi2_critical: p must be in (0,1)");
    double lo = 0.0, hi = 1.0;
    while (chi2_sf(hi, df) > p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi2_sf(mid, df) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double normal_sf(double z) {
    return 0.5 * std::erfc(z / 1.4142135623730951);
}

double digamma(double x) {
    if (x <= 0.0 || std::isnan(x)) throw std::invalid_argument("digamma: x must be > 0");
    // recurrence up to x >= 6, then the asymptotic series
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) throw std::invalid_argument("log_choose: need 0 <= k <= n");
    return std::lgamma(static_cast<double>(n) + 1.0)
         - std::lgamma(static_cast<double>(k) + 1.0)
         - std::lgamma(static_cast<double>(n - k) + 1.0);
}

double kolmogorov_sf(double d, std::size_t n) {
    if (d <= 0.0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    const double p = 2.0 * sum;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

double kolmogorov_critical(double alpha, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("kolmogorov_critical: alpha must be in (0,1)");
    }
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_sf(mid, n) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace surprise
