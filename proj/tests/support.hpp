#ifndef HOAIRY_TESTS_SUPPORT_HPP
#define HOAIRY_TESTS_SUPPORT_HPP

// Independent oracles and random generators shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Dense>

#include <hoairy/diffring.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

/// Ai_n^{(d)}(x) from its Maclaurin series in 50-digit arithmetic. The
/// coefficients Ai_n^{(m)}(0) are integrals along the two steepest rays at
/// angles pi/(2p) and pi - pi/(2p), p = 2n+1, where i lambda^p/p = -r^p/p:
///   Ai_n^{(m)}(0) = p^{(m+1)/p-1} Gamma((m+1)/p)/(2 pi)
///                   * [cos((m+1)a + m pi/2) - cos((m+1)b + m pi/2)].
/// Good for |x| <= 8 (cancellation below 10^7).
inline double airy_series(int n, double xd, int d = 0) {
    const int p = 2 * n + 1;
    const big pi = boost::math::constants::pi<big>();
    const big a = pi / (2 * p), b = pi - pi / (2 * p);
    const big x = xd;
    // Gamma(r/p) for r = 1.. by Gamma(s + 1) = s Gamma(s)
    std::vector<big> gam;
    for (int r = 1; r <= p; ++r) gam.push_back(boost::math::tgamma(big(r) / p));
    auto gamma_r = [&](int r) -> big {
        while (static_cast<int>(gam.size()) < r) {
            int s = static_cast<int>(gam.size()) + 1; // need Gamma(s/p) = (s/p - 1) Gamma(s/p - 1)
            gam.push_back((big(s - p) / p) * gam[static_cast<std::size_t>(s - p - 1)]);
        }
        return gam[static_cast<std::size_t>(r - 1)];
    };
    big sum = 0, xpow = 1, fact = 1, maxterm = 0;
    int small = 0;
    for (int j = 0; j < 5000; ++j) {
        const int m = j + d;
        const big G = pow(big(p), big(m + 1) / p - 1) * gamma_r(m + 1);
        const big c = G / (2 * pi) * (cos((m + 1) * a + m * pi / 2) - cos((m + 1) * b + m * pi / 2));
        const big term = c * xpow / fact;
        sum += term;
        if (abs(term) > maxterm) maxterm = abs(term);
        if (j > 20 && abs(term) < maxterm * big(1e-45) + big(1e-60)) {
            if (++small > 2 * p) break;
        } else {
            small = 0;
        }
        xpow *= x;
        fact *= (j + 1);
    }
    return static_cast<double>(sum);
}

/// Classical Airy kernel by the Christoffel-Darboux form; diagonal by the limit
/// Ai'(x)^2 - x Ai(x)^2.
inline double airy_kernel_cd(double x, double y) {
    const double ax = airy_series(1, x), ay = airy_series(1, y);
    const double dx = airy_series(1, x, 1), dy = airy_series(1, y, 1);
    if (x == y) return dx * dx - x * ax * ax;
    return (ax * dy - dx * ay) / (x - y);
}

/// Hastings-McLeod u(t0) from the boundary value problem u'' = 2u^3 + t u on
/// [-L, L] with u(L) = Ai(L), u(-L) = sqrt(L/2)(1 - 1/(8 L^3) - 73/(128 L^6)),
/// discretized by Numerov's scheme and solved by Newton iteration.
inline double hastings_mcleod(double t0, double L = 8.0, int N = 3200) {
    const double h = 2.0 * L / N;
    Eigen::VectorXd t(N + 1), u(N + 1);
    for (int i = 0; i <= N; ++i) t(i) = -L + i * h;
    const double left = std::sqrt(L / 2.0) * (1.0 - 1.0 / (8.0 * L * L * L) - 73.0 / (128.0 * std::pow(L, 6)));
    const double right = airy_series(1, L);
    // initial guess: blend of the two asymptotic regimes
    for (int i = 0; i <= N; ++i) {
        const double s = t(i);
        u(i) = s < 0 ? std::sqrt(-s / 2.0) : 0.0;
        u(i) = std::max(u(i), std::exp(-2.0 / 3.0 * std::pow(std::abs(s), 1.5)) * 0.3);
    }
    u(0) = left;
    u(N) = right;
    auto f = [&](int i) { return 2.0 * u(i) * u(i) * u(i) + t(i) * u(i); };
    auto fp = [&](int i) { return 6.0 * u(i) * u(i) + t(i); };
    for (int iter = 0; iter < 50; ++iter) {
        // residual r_i = u_{i+1} - 2u_i + u_{i-1} - h^2/12 (f_{i+1} + 10 f_i + f_{i-1})
        const int M = N - 1;
        Eigen::VectorXd r(M), lo(M), di(M), up(M);
        for (int i = 1; i < N; ++i) {
            r(i - 1) = u(i + 1) - 2 * u(i) + u(i - 1) - h * h / 12.0 * (f(i + 1) + 10 * f(i) + f(i - 1));
            di(i - 1) = -2.0 - h * h / 12.0 * 10.0 * fp(i);
            lo(i - 1) = 1.0 - h * h / 12.0 * fp(i - 1);
            up(i - 1) = 1.0 - h * h / 12.0 * fp(i + 1);
        }
        // Thomas algorithm for J du = -r
        Eigen::VectorXd c(M), dd(M);
        c(0) = up(0) / di(0);
        dd(0) = -r(0) / di(0);
        for (int i = 1; i < M; ++i) {
            const double den = di(i) - lo(i) * c(i - 1);
            c(i) = up(i) / den;
            dd(i) = (-r(i) - lo(i) * dd(i - 1)) / den;
        }
        Eigen::VectorXd du(M);
        du(M - 1) = dd(M - 1);
        for (int i = M - 2; i >= 0; --i) du(i) = dd(i) - c(i) * du(i + 1);
        for (int i = 1; i < N; ++i) u(i) += du(i - 1);
        if (du.lpNorm<Eigen::Infinity>() < 1e-15) break;
    }
    // linear interpolation is enough at grid points; t0 is expected on the grid
    const double pos = (t0 + L) / h;
    const int i = static_cast<int>(std::floor(pos));
    const double w = pos - i;
    return (1 - w) * u(i) + w * u(std::min(i + 1, N));
}

/// Least-squares polynomial of degree `deg` through (xs, ys), returned as the
/// value of its d-th derivative at x0. Chebyshev-spaced samples keep it stable.
inline double polyfit_derivative(const std::vector<double>& xs, const std::vector<double>& ys, int deg, double x0,
                                 int d) {
    const Eigen::Index N = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd V(N, deg + 1);
    Eigen::VectorXd y(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        y(i) = ys[static_cast<std::size_t>(i)];
        double v = 1.0;
        for (int c = 0; c <= deg; ++c) {
            V(i, c) = v;
            v *= xs[static_cast<std::size_t>(i)] - x0;
        }
    }
    Eigen::VectorXd coef = V.colPivHouseholderQr().solve(y);
    return coef(d) * std::tgamma(d + 1.0);
}

} // namespace oracle

namespace randpoly {

/// Random DiffPoly in u_1..u_k (orders <= max_order), t and x_j, with small
/// Gaussian-rational coefficients.
inline hoairy::DiffPoly random_poly(std::mt19937& rng, int k, int max_terms = 4, int max_order = 3,
                                    int max_degree = 3, bool with_tx = true) {
    std::uniform_int_distribution<int> nterms(1, max_terms), comp(1, k), order(0, max_order), deg(1, max_degree),
        num(-5, 5), den(1, 4), kind(0, 9);
    hoairy::DiffPoly p;
    const int terms = nterms(rng);
    for (int s = 0; s < terms; ++s) {
        std::vector<hoairy::Monomial::Factor> fs;
        const int d = deg(rng);
        for (int f = 0; f < d; ++f) {
            const int kd = kind(rng);
            if (with_tx && kd == 0)
                fs.emplace_back(hoairy::Generator::t(), 1);
            else if (with_tx && kd == 1)
                fs.emplace_back(hoairy::Generator::x(comp(rng)), 1);
            else
                fs.emplace_back(hoairy::Generator::u(comp(rng), order(rng)), 1);
        }
        hoairy::GaussRational c(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
        p.add_term(hoairy::Monomial::from_factors(fs), c);
    }
    if (kind(rng) < 3) p += hoairy::DiffPoly(hoairy::GaussRational(num(rng)));
    return p;
}

inline hoairy::VecDiffPoly random_vec(std::mt19937& rng, int k) {
    hoairy::VecDiffPoly v(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) v[static_cast<std::size_t>(j)] = random_poly(rng, k);
    return v;
}

} // namespace randpoly

#endif // HOAIRY_TESTS_SUPPORT_HPP
