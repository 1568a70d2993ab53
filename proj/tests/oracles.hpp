// Independent reference implementations used only by the tests. These
// deliberately avoid the library's solver paths: least squares goes through
// the explicit normal equations with Gauss-Jordan inversion, posteriors come
// from the closed-form conjugate algebra, and quantiles from the direct
// order-statistics formula.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracles {

using Matrix = std::vector<std::vector<double>>;  // row major

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    Matrix out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < inner; ++k)
            for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Matrix transpose(const Matrix& a) {
    Matrix out(a[0].size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
    return out;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Matrix inverse(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("oracle inverse: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// theta = (B^T B)^{-1} B^T y, the textbook estimator formula verbatim.
inline std::vector<double> normal_equations_lse(const Matrix& b,
                                                const std::vector<double>& y) {
    const Matrix bt = transpose(b);
    const Matrix btb = matmul(bt, b);
    Matrix ycol(y.size(), std::vector<double>(1));
    for (std::size_t i = 0; i < y.size(); ++i) ycol[i][0] = y[i];
    const Matrix bty = matmul(bt, ycol);
    const Matrix theta = matmul(inverse(btb), bty);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i][0];
    return out;
}

/// Conjugate normal-inverse-gamma posterior for y = X theta + eps with
/// theta | tau ~ N(0, (tau prior_precision I)^{-1}), tau ~ Gamma(a0, b0).
/// Returns the marginal posterior mean and variance of each coefficient.
struct ConjugatePosterior {
    std::vector<double> mean;
    std::vector<double> variance;
};

inline ConjugatePosterior conjugate_linear_posterior(const Matrix& x,
                                                     const std::vector<double>& y,
                                                     double prior_precision, double a0,
                                                     double b0) {
    const std::size_t p = x[0].size(), n = x.size();
    Matrix lambda_n = matmul(transpose(x), x);
    for (std::size_t i = 0; i < p; ++i) lambda_n[i][i] += prior_precision;
    const Matrix lambda_inv = inverse(lambda_n);
    Matrix ycol(n, std::vector<double>(1));
    for (std::size_t i = 0; i < n; ++i) ycol[i][0] = y[i];
    const Matrix xty = matmul(transpose(x), ycol);
    const Matrix mcol = matmul(lambda_inv, xty);

    double yty = 0.0;
    for (double v : y) yty += v * v;
    double m_lambda_m = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m_lambda_m += mcol[i][0] * lambda_n[i][j] * mcol[j][0];
    const double a_n = a0 + 0.5 * static_cast<double>(n);
    const double b_n = b0 + 0.5 * (yty - m_lambda_m);

    ConjugatePosterior post;
    for (std::size_t i = 0; i < p; ++i) {
        post.mean.push_back(mcol[i][0]);
        // marginal is Student-t: Var = b_n/(a_n - 1) * Lambda_n^{-1}
        post.variance.push_back(b_n / (a_n - 1.0) * lambda_inv[i][i]);
    }
    return post;
}

inline double determinant(Matrix a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (pivot != col) {
            std::swap(a[col], a[pivot]);
            det = -det;
        }
        if (a[col][col] == 0.0) return 0.0;
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

/// Exact posterior moments for the semi-conjugate model the sampler targets:
/// y = X theta + eps, theta ~ N(0, prior_precision^{-1} I) independent of
/// tau ~ Gamma(a0, b0). Marginalizes tau by trapezoid quadrature on log tau;
/// everything reduces to p x p algebra via Woodbury and Sylvester.
inline ConjugatePosterior semi_conjugate_posterior(const Matrix& x,
                                                   const std::vector<double>& y,
                                                   double prior_precision, double a0,
                                                   double b0,
                                                   std::size_t n_nodes = 4001) {
    const std::size_t n = x.size(), p = x[0].size();
    const Matrix xtx = matmul(transpose(x), x);
    Matrix ycol(n, std::vector<double>(1));
    for (std::size_t i = 0; i < n; ++i) ycol[i][0] = y[i];
    const Matrix xty = matmul(transpose(x), ycol);
    double yty = 0.0;
    for (double v : y) yty += v * v;

    // center the grid at the OLS-based precision estimate
    const auto theta_ols = normal_equations_lse(x, y);
    double ssr = yty;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += x[i][j] * theta_ols[j];
        ssr += fit * fit - 2.0 * fit * y[i];
    }
    const double tau_center = (ssr > 1e-12 && n > p)
                                  ? static_cast<double>(n - p) / ssr
                                  : 1.0;
    const double u_lo = std::log(tau_center) - 12.0;
    const double u_hi = std::log(tau_center) + 12.0;
    const double du = (u_hi - u_lo) / static_cast<double>(n_nodes - 1);

    std::vector<double> log_w(n_nodes);
    std::vector<std::vector<double>> node_mean(n_nodes), node_second(n_nodes);
    double log_w_max = -1e300;
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double u = u_lo + du * static_cast<double>(k);
        const double tau = std::exp(u);
        Matrix lambda = xtx;
        Matrix cap = xtx;  // I_p + (tau/prior_precision) X^T X
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                lambda[i][j] = prior_precision * (i == j) + tau * xtx[i][j];
                cap[i][j] = (i == j) + tau / prior_precision * xtx[i][j];
            }
        const Matrix lambda_inv = inverse(lambda);
        std::vector<double> m(p, 0.0);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                m[i] += lambda_inv[i][j] * tau * xty[j][0];
        double quad = 0.0;  // (X^T y)^T Lambda^{-1} (X^T y)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                quad += xty[i][0] * lambda_inv[i][j] * xty[j][0];
        const double y_prec_y = tau * yty - tau * tau * quad;
        const double log_det_sigma =
            -static_cast<double>(n) * u + std::log(determinant(cap));
        const double log_lik = -0.5 * (static_cast<double>(n) * std::log(2.0 * 3.14159265358979323846) +
                                       log_det_sigma + y_prec_y);
        const double log_prior = (a0 - 1.0) * u - b0 * tau;
        log_w[k] = log_prior + log_lik + u;  // + u: Jacobian of tau = e^u
        log_w_max = std::max(log_w_max, log_w[k]);

        node_mean[k] = m;
        node_second[k].resize(p);
        for (std::size_t i = 0; i < p; ++i)
            node_second[k][i] = lambda_inv[i][i] + m[i] * m[i];
    }

    double total = 0.0;
    std::vector<double> mean(p, 0.0), second(p, 0.0);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double trap = (k == 0 || k == n_nodes - 1) ? 0.5 : 1.0;
        const double w = trap * std::exp(log_w[k] - log_w_max);
        total += w;
        for (std::size_t i = 0; i < p; ++i) {
            mean[i] += w * node_mean[k][i];
            second[i] += w * node_second[k][i];
        }
    }
    ConjugatePosterior post;
    for (std::size_t i = 0; i < p; ++i) {
        post.mean.push_back(mean[i] / total);
        post.variance.push_back(second[i] / total - post.mean.back() * post.mean.back());
    }
    return post;
}

/// Quantile by linear interpolation of order statistics on a copy.
inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

/// Data exactly satisfying the discrete GM form x0(k) + a z(k) = b, so a
/// full-rank least-squares fit must recover (a, b) to machine precision.
inline std::vector<double> gm11_discrete_series(double a, double b, double x0_1,
                                                std::size_t n) {
    std::vector<double> x{x0_1};
    double acc = x0_1;
    for (std::size_t k = 1; k < n; ++k) {
        // x0 + a (acc + x0/2) = b
        const double x0 = (b - a * acc) / (1.0 + 0.5 * a);
        x.push_back(x0);
        acc += x0;
    }
    return x;
}

/// Series generated by the GM(1,1) prediction equation itself:
/// x0(k+1) = (1 - e^a)(x0_1 - b/a) e^{-ak}.
inline std::vector<double> gm11_response_series(double a, double b, double x0_1,
                                                std::size_t n) {
    std::vector<double> x{x0_1};
    for (std::size_t k = 1; k < n; ++k)
        x.push_back((1.0 - std::exp(a)) * (x0_1 - b / a) *
                    std::exp(-a * static_cast<double>(k)));
    return x;
}

/// Differenced samples of the exact logistic (Verhulst) solution
/// x1(t) = a x0_1 / (b x0_1 + (a - b x0_1) e^{a(t-1)}).
inline std::vector<double> verhulst_response_series(double a, double b, double x0_1,
                                                    std::size_t n) {
    auto x1 = [&](double t) {
        return a * x0_1 / (b * x0_1 + (a - b * x0_1) * std::exp(a * (t - 1.0)));
    };
    std::vector<double> x{x0_1};
    for (std::size_t k = 2; k <= n; ++k)
        x.push_back(x1(static_cast<double>(k)) - x1(static_cast<double>(k - 1)));
    return x;
}

}  // namespace oracles
