#include "qpmix/special_functions.hpp"

#include "qpmix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qpmix {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 10000;

// Remainder of Stirling's series: lgamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], x >= 10.
double stirling_remainder(double x) {
    const double x2 = 1.0 / (x * x);
    return (1.0 / 12.0 -
            x2 * (1.0 / 360.0 - x2 * (1.0 / 1260.0 - x2 * (1.0 / 1680.0 - x2 * (1.0 / 1188.0 - x2 * (691.0 / 360360.0))))))
           / x;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

double gamma_series(double s, double x) {
    double ap = s, sum = 1.0 / s, del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

double gamma_continued_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double s, double x) {
    if (!(s > 0.0)) throw DomainError("incomplete gamma: shape must be positive");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be non-negative");
}

}  // namespace

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta: shape parameters must be positive");
    const double big = std::max(a, b), small = std::min(a, b);
    if (big < 10.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    // lgamma(big) - lgamma(big + small) without cancelling the large leading terms.
    const double diff = -(big - 0.5) * std::log1p(small / big) - small * std::log(big + small) + small +
                        stirling_remainder(big) - stirling_remainder(big + small);
    return std::lgamma(small) + diff;
}

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: shape parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double front = std::exp(log_front);
    double value;
    if (x < (a + 1.0) / (a + b + 2.0))
        value = front * beta_continued_fraction(a, b, x) / a;
    else
        value = 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
    return std::clamp(value, 0.0, 1.0);
}

double reg_inc_gamma_lower(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return std::clamp(gamma_series(s, x), 0.0, 1.0);
    return std::clamp(1.0 - gamma_continued_fraction(s, x), 0.0, 1.0);
}

double reg_inc_gamma_upper(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return std::clamp(1.0 - gamma_series(s, x), 0.0, 1.0);
    return std::clamp(gamma_continued_fraction(s, x), 0.0, 1.0);
}

}  // namespace qpmix
