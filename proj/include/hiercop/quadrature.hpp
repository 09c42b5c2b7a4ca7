#pragma once

// Gauss-Legendre and Gauss-Hermite rules, computed by Newton iteration on the
// orthogonal-polynomial recurrences. Node counts used here are small (<= 128).

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hiercop::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes/weights for integrating over [-1, 1].
inline Rule gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

// Rule mapped onto (a, b).
inline Rule gauss_legendre_ab(int n, double a, double b) {
    Rule r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

inline Rule gauss_legendre_01(int n) { return gauss_legendre_ab(n, 0.0, 1.0); }

// Physicists' Gauss-Hermite rule: integrates f against exp(-t^2) over R.
inline Rule gauss_hermite(int n) {
    if (n < 1) throw std::domain_error("gauss_hermite: n must be >= 1");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * r.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * r.nodes[1];
        else
            z = 2.0 * z - r.nodes[i - 2];
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-14) break;
        }
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

// Adaptive Simpson on (a, b); test-grade utility for normalization checks.
template <typename F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-10, int max_depth = 50) {
    struct Impl {
        F& f;
        int max_depth;
        double run(double a, double fa, double m, double fm, double b, double fb,
                   double whole, double tol, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth >= max_depth || std::fabs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return run(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
                   run(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Impl impl{f, max_depth};
    return impl.run(a, fa, m, fm, b, fb, whole, tol, 0);
}

} // namespace hiercop::quad
