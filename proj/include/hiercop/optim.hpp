#pragma once

// Derivative-free simplex and quasi-Newton minimizers plus the small dense
// symmetric linear algebra needed for observed-information standard errors.
// Problems here are tiny (<= a dozen parameters), so plain O(n^3) routines.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hiercop::optim {

using Vec = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Cholesky factor (lower) of an SPD matrix; throws if not positive definite.
inline Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw std::runtime_error("cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline Vec cholesky_solve(const Matrix& l, Vec b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
        b[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
        b[i] /= l(i, i);
    }
    return b;
}

inline Matrix invert_spd(const Matrix& a) {
    const std::size_t n = a.rows();
    const Matrix l = cholesky(a);
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec x = cholesky_solve(l, std::move(e));
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
    }
    return inv;
}

// Jacobi eigen-decomposition of a symmetric matrix: a = V diag(w) V^T.
inline void jacobi_eigen(Matrix a, Vec& w, Matrix& v) {
    const std::size_t n = a.rows();
    v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a(i, i);
}

// Moore-Penrose pseudo-inverse of a symmetric matrix (eigenvalues below
// tol * max|lambda| are dropped).
inline Matrix pinv_sym(const Matrix& a, double tol = 1e-12) {
    const std::size_t n = a.rows();
    Vec w;
    Matrix v;
    jacobi_eigen(a, w, v);
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::fabs(x));
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(w[k]) <= tol * wmax) continue;
        const double inv = 1.0 / w[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += v(i, k) * inv * v(j, k);
    }
    return out;
}

using Objective = std::function<double(const Vec&)>;

struct Result {
    Vec x;
    double f = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    int evaluations = 0;
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string message;
};

struct Options {
    int max_iterations = 500;
    double f_rel_tol = 1e-9;
    double x_tol = 1e-10;
    double grad_step = 1e-6; // relative central-difference step
};

inline Vec num_gradient(const Objective& f, const Vec& x, double rel_step = 1e-6) {
    const std::size_t n = x.size();
    Vec g(n);
    Vec xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = rel_step * (1.0 + std::fabs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Central-difference Hessian with per-coordinate step h_k = step*(1+|x_k|).
inline Matrix num_hessian(const Objective& f, const Vec& x, double step = 1e-4) {
    const std::size_t n = x.size();
    Vec h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = step * (1.0 + std::fabs(x[i]));
    const double f0 = f(x);
    Matrix hess(n, n);
    Vec xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] = x[i] + h[i];
        const double fp = f(xp);
        xp[i] = x[i] - h[i];
        const double fm = f(xp);
        xp[i] = x[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            xp[i] = x[i] + h[i]; xp[j] = x[j] + h[j];
            const double fpp = f(xp);
            xp[j] = x[j] - h[j];
            const double fpm = f(xp);
            xp[i] = x[i] - h[i]; xp[j] = x[j] + h[j];
            const double fmp = f(xp);
            xp[j] = x[j] - h[j];
            const double fmm = f(xp);
            xp[i] = x[i]; xp[j] = x[j];
            hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    return hess;
}

// Nelder-Mead simplex. Works for n >= 1; non-finite objective values are
// treated as +inf, which doubles as a domain barrier.
inline Result nelder_mead(const Objective& f_raw, Vec x0, Options opt = {},
                          double initial_step = 0.25) {
    const std::size_t n = x0.size();
    int evals = 0;
    auto f = [&](const Vec& x) {
        ++evals;
        const double v = f_raw(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<Vec> simplex(n + 1, x0);
    Vec fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += initial_step * (1.0 + std::fabs(x0[i]));
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    Result res;
    int iter = 0;
    std::vector<std::size_t> order(n + 1);
    for (; iter < opt.max_iterations * static_cast<int>(n + 1); ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n];
        const double fbest = fv[best], fworst = fv[worst];

        double span = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            span = std::max(span, std::fabs(simplex[worst][i] - simplex[best][i]));
        if (std::isfinite(fworst) &&
            (std::fabs(fworst - fbest) <= opt.f_rel_tol * (1.0 + std::fabs(fbest)) ||
             span <= opt.x_tol)) {
            res.converged = true;
            break;
        }

        Vec centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            Vec p(n);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return p;
        };

        Vec xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fbest) {
            Vec xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) { simplex[worst] = std::move(xe); fv[worst] = fe; }
            else { simplex[worst] = std::move(xr); fv[worst] = fr; }
        } else if (fr < fv[order[n - 1]]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            Vec xc = blend(fr < fworst ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fworst)) {
                simplex[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
                    fv[k] = f(simplex[k]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.f = fv[best];
    res.iterations = iter;
    res.evaluations = evals;
    if (!res.converged) res.message = "nelder_mead: iteration limit reached";
    return res;
}

// BFGS with central-difference gradients and a backtracking Armijo line search.
// Hessian approximation kept positive definite by skipping updates with
// non-positive curvature.
inline Result bfgs(const Objective& f_raw, Vec x0, Options opt = {}) {
    const std::size_t n = x0.size();
    int evals = 0;
    auto f = [&](const Vec& x) {
        ++evals;
        const double v = f_raw(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    auto grad = [&](const Vec& x) { return num_gradient(f, x, opt.grad_step); };

    Result res;
    Vec x = std::move(x0);
    double fx = f(x);
    if (!std::isfinite(fx)) {
        res.x = x;
        res.f = fx;
        res.message = "bfgs: objective not finite at the starting point";
        return res;
    }
    Vec g = grad(x);
    Matrix h = Matrix::identity(n); // inverse-Hessian approximation

    int iter = 0;
    bool restarted = false;
    for (; iter < opt.max_iterations; ++iter) {
        double gnorm = 0.0;
        for (double gi : g) gnorm = std::max(gnorm, std::fabs(gi));
        res.grad_norm = gnorm;
        if (gnorm <= 1e-8 * (1.0 + std::fabs(fx))) {
            res.converged = true;
            break;
        }

        Vec d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= h(i, j) * g[j];
        double dg = std::inner_product(d.begin(), d.end(), g.begin(), 0.0);
        if (!(dg < 0.0)) {
            h = Matrix::identity(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            dg = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        }

        double alpha = 1.0;
        double fn = std::numeric_limits<double>::infinity();
        Vec xn(n);
        bool ls_ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + alpha * d[i];
            fn = f(xn);
            if (fn <= fx + 1e-4 * alpha * dg) {
                ls_ok = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!ls_ok) {
            if (!restarted) { // retry once with a fresh metric
                restarted = true;
                h = Matrix::identity(n);
                continue;
            }
            res.message = "bfgs: line search failed";
            break;
        }

        Vec gn = grad(xn);
        Vec s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            // h <- (I - rho s y^T) h (I - rho y s^T) + rho s s^T
            Vec hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hy[i] += h(i, j) * y[j];
            const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h(i, j) += (sy + yhy) * rho * rho * s[i] * s[j] -
                               rho * (hy[i] * s[j] + s[i] * hy[j]);
        }

        const double df = std::fabs(fx - fn);
        x = std::move(xn);
        fx = fn;
        g = std::move(gn);
        if (df <= opt.f_rel_tol * (1.0 + std::fabs(fx))) {
            double gn2 = 0.0;
            for (double gi : g) gn2 = std::max(gn2, std::fabs(gi));
            res.grad_norm = gn2;
            res.converged = true;
            ++iter;
            break;
        }
    }
    res.x = std::move(x);
    res.f = fx;
    res.iterations = iter;
    res.evaluations = evals;
    if (!res.converged && res.message.empty())
        res.message = "bfgs: iteration limit reached";
    return res;
}

} // namespace hiercop::optim
