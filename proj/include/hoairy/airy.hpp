#ifndef HOAIRY_AIRY_HPP
#define HOAIRY_AIRY_HPP

// Higher-order Airy functions Ai_n(x) = (1/2pi) int_{Gamma+} exp(i psi_n(lambda; x)) dlambda
// with psi_n(lambda; x) = lambda^{2n+1}/(2n+1) + lambda x, by Gauss-Legendre
// quadrature along two rays.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace hoairy {

using cplx = std::complex<double>;

struct PhaseParams {
    int n = 1;
    double t = 0.0;
};

/// psi_n(lambda; t) = lambda^{2n+1}/(2n+1) + lambda t.
inline cplx phase(int n, cplx lambda, double t) {
    const int p = 2 * n + 1;
    cplx power = lambda;
    for (int j = 1; j < p; ++j) power *= lambda;
    return power / static_cast<double>(p) + lambda * t;
}

inline cplx phase(const PhaseParams& params, cplx lambda) { return phase(params.n, lambda, params.t); }

/// Two rays leaving the apex i*c: one towards infinity at angle_in (traversed
/// inwards), one towards infinity at angle_out. radius <= 0 and apex < 0 select
/// the x-dependent defaults.
struct ContourSpec {
    int n = 1;
    double angle_in = 0.0;
    double angle_out = 0.0;
    double radius = 0.0;
    int nodes_per_ray = 200;
    double apex = -1.0;

    static ContourSpec standard(int n) {
        const double p = 2.0 * n + 1.0;
        ContourSpec c;
        c.n = n;
        c.angle_in = std::numbers::pi - std::numbers::pi / (2.0 * p);
        c.angle_out = std::numbers::pi / (2.0 * p);
        return c;
    }

    void validate() const {
        if (n < 1) fail(ErrorKind::InvalidArgument, "Airy order n must be >= 1");
        const double p = 2.0 * n + 1.0, pi = std::numbers::pi;
        if (!(angle_in > 2.0 * n * pi / p && angle_in < pi))
            fail(ErrorKind::SectorViolation, "incoming angle " + std::to_string(angle_in) + " outside (2n pi/(2n+1), pi)");
        if (!(angle_out > 0.0 && angle_out < pi / p))
            fail(ErrorKind::SectorViolation, "outgoing angle " + std::to_string(angle_out) + " outside (0, pi/(2n+1))");
        if (!std::isfinite(radius) || nodes_per_ray < 1)
            fail(ErrorKind::InvalidArgument, "contour radius and node count must be finite and positive");
    }

    double radius_for(double x) const {
        return radius > 0.0 ? radius : 6.0 + 2.0 * std::pow(std::abs(x), 1.0 / (2.0 * n));
    }

    /// Default apex: the saddle i sqrt(x) for n = 1, a fraction of the saddle
    /// height for n >= 2; 0 for x <= 0.
    double apex_for(double x) const {
        if (apex >= 0.0) return apex;
        if (x <= 0.0) return 0.0;
        const double height = std::sin(std::numbers::pi / (2.0 * n)) * std::pow(x, 1.0 / (2.0 * n));
        return (n == 1 ? 1.0 : 0.4) * height;
    }

    ContourSpec doubled() const {
        ContourSpec c = *this;
        c.nodes_per_ray *= 2;
        return c;
    }
};

struct AiryValue {
    double value = 0.0;
    double imag_residual = 0.0;
    /// integrand magnitude at the truncation radius divided by its decay rate
    double tail_estimate = 0.0;
};

/// Largest argument handled; beyond it evaluation fails with NonConvergence.
inline double airy_working_limit(int n) { return n == 1 ? 80.0 : 60.0; }

inline constexpr double airy_tail_tolerance = 1e-13;

/// (1/2pi) int (i lambda)^m exp(i psi_n(lambda; x)) dlambda with diagnostics.
/// Does not throw on large residuals; see ai_n_deriv for the checked version.
inline AiryValue ai_n_eval(int n, double x, int m, const ContourSpec& contour) {
    contour.validate();
    if (contour.n != n) fail(ErrorKind::InvalidArgument, "contour built for a different order n");
    if (m < 0) fail(ErrorKind::InvalidArgument, "derivative order must be >= 0");
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "Airy argument must be finite");

    const GaussLegendre& rule = gauss_legendre(static_cast<std::size_t>(contour.nodes_per_ray));
    const double R = contour.radius_for(x);
    const cplx apex(0.0, contour.apex_for(x));
    const cplx I(0.0, 1.0);

    cplx total = 0.0;
    double tail = 0.0;
    for (int ray = 0; ray < 2; ++ray) {
        const double theta = ray == 0 ? contour.angle_out : contour.angle_in;
        const double sign = ray == 0 ? 1.0 : -1.0;
        const cplx dir = std::polar(1.0, theta);
        cplx sum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double r = 0.5 * R * (rule.nodes[q] + 1.0);
            const cplx lambda = apex + r * dir;
            cplx f = std::exp(I * phase(n, lambda, x));
            if (m > 0) f *= std::pow(I * lambda, m);
            sum += rule.weights[q] * f;
        }
        total += sign * (0.5 * R) * sum * dir;

        const cplx end = apex + R * dir;
        cplx fend = std::exp(I * phase(n, end, x));
        if (m > 0) fend *= std::pow(I * end, m);
        // d/dr Re(i psi) along the ray
        cplx lp = end;
        for (int j = 1; j < 2 * n; ++j) lp *= end;
        const double decay = -std::real(I * (lp + x) * dir);
        tail += decay > 0.0 ? std::abs(fend) / decay : std::numeric_limits<double>::infinity();
    }
    total /= 2.0 * std::numbers::pi;
    return {total.real(), total.imag(), tail / (2.0 * std::numbers::pi)};
}

/// Ai_n^{(m)}(x). Fails with NonConvergence if the tail estimate or the
/// imaginary residual is too large, or x lies beyond the working range.
inline double ai_n_deriv(int n, double x, int m, const ContourSpec& contour) {
    if (x > airy_working_limit(n))
        fail(ErrorKind::NonConvergence,
             "Ai_" + std::to_string(n) + " argument " + std::to_string(x) + " beyond the working range");
    const AiryValue v = ai_n_eval(n, x, m, contour);
    if (!(v.tail_estimate <= airy_tail_tolerance))
        fail(ErrorKind::NonConvergence, "Ai_" + std::to_string(n) + " ray tail estimate " +
                                            std::to_string(v.tail_estimate) + " exceeds tolerance");
    const double scale = std::max(1.0, std::abs(v.value));
    if (!(std::abs(v.imag_residual) <= 1e-10 * scale))
        fail(ErrorKind::NonConvergence, "Ai_" + std::to_string(n) + " imaginary residual " +
                                            std::to_string(v.imag_residual) + " exceeds tolerance");
    return v.value;
}

inline double ai_n_deriv(int n, double x, int m) { return ai_n_deriv(n, x, m, ContourSpec::standard(n)); }
inline double ai_n(int n, double x, const ContourSpec& contour) { return ai_n_deriv(n, x, 0, contour); }
inline double ai_n(int n, double x) { return ai_n_deriv(n, x, 0); }

} // namespace hoairy

#endif // HOAIRY_AIRY_HPP
