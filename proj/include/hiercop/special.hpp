#pragma once

// Scalar special functions used throughout the library: normal pdf/cdf/quantile,
// regularized incomplete beta and gamma with inverses, and the bivariate normal
// rectangle probability. Accuracy targets: relative error <= 1e-12 for the
// univariate functions, absolute error <= 1e-10 for the bivariate cdf. These
// bounds are load-bearing: h-function inversion and likelihoods compose them.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hiercop::special {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt2 = 1.41421356237309504880;
inline constexpr double sqrt2pi = 2.50662827463100050242;

inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / sqrt2pi;
}

inline double norm_log_pdf(double x) {
    return -0.5 * x * x - std::log(sqrt2pi);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / sqrt2);
}

// Wichura's AS 241 (PPND16), relative error ~1e-16 over (0,1).
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie in (0,1), got " + std::to_string(p));
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

inline double log_gamma(double x) { return std::lgamma(x); }

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
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
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("inc_beta: continued fraction did not converge");
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0))
        throw std::domain_error("inc_beta: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lnfront) * detail::beta_cont_frac(a, b, x) / a;
    return 1.0 - std::exp(lnfront) * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

// Inverse of I_x(a, b): Newton iteration with a bisection safeguard.
inline double inc_beta_inv(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("inc_beta_inv: p outside [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    // Initial guess: moment-matched normal approximation (Abramowitz & Stegun 26.5.22).
    double x;
    {
        const double yp = norm_quantile(p < 1.0 ? p : 1.0 - 1e-16);
        const double al = 1.0 / (2.0 * a - 1.0);
        const double be = 1.0 / (2.0 * b - 1.0);
        if (a > 1.0 && b > 1.0) {
            const double lam = (yp * yp - 3.0) / 6.0;
            const double h = 2.0 / (al + be);
            const double w = yp * std::sqrt(h + lam) / h -
                             (be - al) * (lam + 5.0 / 6.0 - 2.0 / (3.0 * h));
            x = a / (a + b * std::exp(2.0 * w));
        } else {
            const double lna = std::log(a / (a + b));
            const double lnb = std::log(b / (a + b));
            const double t = std::exp(a * lna) / a;
            const double u = std::exp(b * lnb) / b;
            const double w = t + u;
            if (p < t / w)
                x = std::pow(a * w * p, 1.0 / a);
            else
                x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
        }
    }
    double lo = 0.0, hi = 1.0;
    if (x <= 0.0 || x >= 1.0) x = 0.5;
    const double lnbeta = log_beta(a, b);
    for (int it = 0; it < 100; ++it) {
        const double f = inc_beta(a, b, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        const double logpdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lnbeta;
        double step = f * std::exp(-logpdf);
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-16 * (1.0 + std::fabs(x))) { x = xn; break; }
        x = xn;
    }
    return x;
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 1; n <= 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_p: series did not converge");
}

inline double gamma_q_cont_frac(double a, double x) {
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_q: continued fraction did not converge");
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cont_frac(a, x);
}

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chisq_upper_tail(double x, int df) {
    if (df < 1) throw std::domain_error("chisq_upper_tail: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

// Bivariate normal cdf P(X <= x, Y <= y) with correlation rho.
// Genz (2004) reworking of the Drezner-Wesolowsky algorithm; |error| < 5e-16.
inline double binorm_cdf(double x, double y, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        if (rho >= 1.0) return norm_cdf(std::min(x, y));
        if (rho <= -1.0) {
            const double s = norm_cdf(x) + norm_cdf(y) - 1.0;
            return s > 0.0 ? s : 0.0;
        }
    }
    // Gauss-Legendre abscissae/weights for the three precision regimes.
    static const double xg1[3] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969};
    static const double wg1[3] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
    static const double xg2[6] = {-0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
                                  -0.5873179542866175, -0.3678314989981802, -0.1252334085114689};
    static const double wg2[6] = {0.04717533638651183, 0.1069393259953184, 0.1600783285433462,
                                  0.2031674267230659,  0.2334925365383548, 0.2491470458134028};
    static const double xg3[10] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                   -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                   -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
                                   -0.07652652113349734};
    static const double wg3[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410907,
                                   0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                   0.1316886384491766,  0.1420961093183820,  0.1491729864726037,
                                   0.1527533871307258};
    const double* xg;
    const double* wg;
    int ng;
    const double ar = std::fabs(rho);
    if (ar < 0.3) { xg = xg1; wg = wg1; ng = 3; }
    else if (ar < 0.75) { xg = xg2; wg = wg2; ng = 6; }
    else { xg = xg3; wg = wg3; ng = 10; }

    // Genz's BVND computes P(X > -h, Y > -k); pass h = -x, k = -y.
    const double h = -x, k = -y;
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(rho);
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double sn = std::sin(0.5 * asr * (is * xg[i] + 1.0));
                bvn += wg[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / (4.0 * pi) + norm_cdf(-h) * norm_cdf(-k);
    } else {
        double hh = h, kk = k;
        if (rho < 0.0) { kk = -kk; hk = -hk; }
        if (ar < 1.0) {
            const double as = (1.0 - rho) * (1.0 + rho);
            double a = std::sqrt(as);
            const double bs = (hh - kk) * (hh - kk);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 16.0;
            double asrv = -0.5 * (bs / as + hk);
            if (asrv > -100.0)
                bvn = a * std::exp(asrv) *
                      (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
            if (-hk < 100.0) {
                const double b = std::sqrt(bs);
                bvn -= std::exp(-0.5 * hk) * sqrt2pi * norm_cdf(-b / a) * b *
                       (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a *= 0.5;
            for (int i = 0; i < ng; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double xs = (a * (is * xg[i] + 1.0)) * (a * (is * xg[i] + 1.0));
                    const double rs = std::sqrt(1.0 - xs);
                    asrv = -0.5 * (bs / xs + hk);
                    if (asrv > -100.0) {
                        bvn += a * wg[i] * std::exp(asrv) *
                               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                                (1.0 + c * xs * (1.0 + d * xs)));
                    }
                }
            }
            bvn = -bvn / (2.0 * pi);
        }
        if (rho > 0.0) {
            bvn += norm_cdf(-std::max(hh, kk));
        } else {
            bvn = -bvn;
            if (kk > hh) bvn += norm_cdf(kk) - norm_cdf(hh);
        }
    }
    if (bvn < 0.0) bvn = 0.0;
    if (bvn > 1.0) bvn = 1.0;
    return bvn;
}

} // namespace hiercop::special
