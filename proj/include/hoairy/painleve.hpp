#ifndef HOAIRY_PAINLEVE_HPP
#define HOAIRY_PAINLEVE_HPP

// Numerical solution of (L+ L-)^n u = -diag(x_j + t) u backwards from large t
// with data sqrt(alpha_j - alpha_{j+1}) Ai_n(t + x_j), and the integral
// log F = -int_0^inf t <u, u> dt.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <nlohmann/json.hpp>

#include "airy.hpp"
#include "errors.hpp"
#include "hierarchy.hpp"
#include "quadrature.hpp"

namespace hoairy {

// ---------------------------------------------------------------------------
// Compiled right-hand side
// ---------------------------------------------------------------------------

/// Evaluates u_j^{(2n)} from (t, x, u^{(m)}, m < 2n). State layout:
/// index m*k + (j-1) holds u_j^{(m)}.
class CompiledRHS {
public:
    struct Term {
        cplx coeff;
        std::vector<std::pair<int, int>> factors; ///< (variable, power)
    };

    CompiledRHS() = default;

    int n() const { return n_; }
    std::size_t k() const { return k_; }
    std::size_t state_size() const { return 2 * static_cast<std::size_t>(n_) * k_; }

    /// Variables: state entries, then t, then x_1..x_k.
    int variable_count() const { return static_cast<int>(state_size() + 1 + k_); }
    int t_index() const { return static_cast<int>(state_size()); }
    int x_index(std::size_t j) const { return static_cast<int>(state_size() + j); } // j 1-based

    /// top[j] = u_{j+1}^{(2n)}; vars has variable_count() entries.
    void evaluate(const cplx* vars, cplx* top) const {
        for (std::size_t j = 0; j < k_; ++j) {
            cplx sum = 0.0;
            for (const Term& term : components_[j]) {
                cplx v = term.coeff;
                for (const auto& [var, power] : term.factors) {
                    const cplx b = vars[var];
                    switch (power) {
                    case 1: v *= b; break;
                    case 2: v *= b * b; break;
                    default: v *= std::pow(b, power); break;
                    }
                }
                sum += v;
            }
            top[j] = sum;
        }
    }

    std::vector<cplx> evaluate(double t, const std::vector<double>& x, const std::vector<cplx>& state) const {
        if (x.size() != k_ || state.size() != state_size())
            fail(ErrorKind::DimensionMismatch, "compiled RHS called with wrong dimensions");
        std::vector<cplx> vars(static_cast<std::size_t>(variable_count()));
        std::copy(state.begin(), state.end(), vars.begin());
        vars[static_cast<std::size_t>(t_index())] = t;
        for (std::size_t j = 1; j <= k_; ++j) vars[static_cast<std::size_t>(x_index(j))] = x[j - 1];
        std::vector<cplx> top(k_);
        evaluate(vars.data(), top.data());
        return top;
    }

    const std::vector<std::vector<Term>>& components() const { return components_; }

    friend CompiledRHS compile_rhs(const HierarchyMember& member);

private:
    int n_ = 1;
    std::size_t k_ = 1;
    std::vector<std::vector<Term>> components_;
};

/// Solves each component of lhs - rhs = 0 for D^{2n} u_j. The coefficient of
/// D^{2n} u_j must be i^{2n} and no other term may reach order 2n.
inline CompiledRHS compile_rhs(const HierarchyMember& member) {
    CompiledRHS rhs;
    rhs.n_ = member.n;
    rhs.k_ = member.k;
    const int top = 2 * member.n;
    const VecDiffPoly eq = member.equation();
    const GaussRational expected = GaussRational::i_pow(top);
    rhs.components_.resize(member.k);
    for (std::size_t j = 1; j <= member.k; ++j) {
        const DiffPoly& p = eq[j - 1];
        const Monomial lead(Generator::u(static_cast<int>(j), top));
        const GaussRational c = p.coefficient(lead);
        if (c != expected)
            fail(ErrorKind::NotMonic, "component " + std::to_string(j) + ": coefficient of D^" +
                                          std::to_string(top) + "u is " + c.str() + ", expected " + expected.str());
        const cplx scale = -1.0 / c.to_complex();
        for (const auto& [mono, coeff] : p.terms()) {
            if (mono == lead) continue;
            CompiledRHS::Term term{coeff.to_complex() * scale, {}};
            for (const auto& [g, e] : mono.factors()) {
                int var = 0;
                if (g.is_u()) {
                    if (g.order >= top)
                        fail(ErrorKind::NotMonic, "component " + std::to_string(j) + ": term " + mono.str() +
                                                      " reaches the top derivative order");
                    var = g.order * static_cast<int>(member.k) + g.component - 1;
                } else if (g.is_t()) {
                    var = rhs.t_index();
                } else {
                    var = rhs.x_index(static_cast<std::size_t>(g.component));
                }
                term.factors.emplace_back(var, e);
            }
            rhs.components_[j - 1].push_back(std::move(term));
        }
    }
    return rhs;
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

struct PainleveProblem {
    int n = 1;
    std::vector<double> x;     ///< x_1..x_k
    std::vector<double> alpha; ///< alpha_1..alpha_k, alpha_{k+1} = 0

    std::size_t k() const { return x.size(); }

    double weight_gap(std::size_t j) const { // j 0-based: alpha_j - alpha_{j+1}
        return alpha[j] - (j + 1 < alpha.size() ? alpha[j + 1] : 0.0);
    }

    void validate() const {
        if (n < 1) fail(ErrorKind::InvalidArgument, "order n must be >= 1");
        if (x.empty() || x.size() != alpha.size())
            fail(ErrorKind::DimensionMismatch, "x and alpha must be nonempty and of equal length");
        for (std::size_t j = 0; j + 1 < alpha.size(); ++j)
            if (alpha[j] == alpha[j + 1])
                fail(ErrorKind::WeightCollision, "alpha_" + std::to_string(j + 1) + " = alpha_" + std::to_string(j + 2));
        for (double v : x)
            if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "x must be finite");
        for (double a : alpha)
            if (!std::isfinite(a)) fail(ErrorKind::InvalidArgument, "alpha must be finite");
    }
};

inline constexpr double seed_threshold = 1e-6;

inline double default_t_max(int n) { return n == 1 ? 8.0 : 6.0; }

/// Largest |sqrt(alpha_j - alpha_{j+1}) Ai_n^{(m)}(t + x_j)| over j and m < 2n.
inline double seed_magnitude(const PainleveProblem& prob, double t) {
    double mx = 0.0;
    for (std::size_t j = 0; j < prob.k(); ++j) {
        const double s = std::sqrt(std::abs(prob.weight_gap(j)));
        for (int m = 0; m < 2 * prob.n; ++m) mx = std::max(mx, s * std::abs(ai_n_deriv(prob.n, t + prob.x[j], m)));
    }
    return mx;
}

/// Starting point of the backward integration: the default shifted by
/// max(0, -min x_j), then raised in steps of 1/2 until the seed magnitude is
/// below the threshold at T, T - 1/2 and T - 1 (Ai_n oscillates for n >= 2, so
/// a single small sample can be a near-zero).
inline double choose_t_max(const PainleveProblem& prob) {
    prob.validate();
    const double min_x = *std::min_element(prob.x.begin(), prob.x.end());
    double T = default_t_max(prob.n) + std::max(0.0, -min_x);
    T = std::ceil(2.0 * T) / 2.0;
    for (int iter = 0; iter < 200; ++iter, T += 0.5) {
        if (std::max({seed_magnitude(prob, T), seed_magnitude(prob, T - 0.5), seed_magnitude(prob, T - 1.0)}) <=
            seed_threshold)
            return T;
    }
    fail(ErrorKind::SeedTooLarge, "no admissible t_max found");
}

/// State at t_max: u_j^{(m)} = sqrt(alpha_j - alpha_{j+1}) Ai_n^{(m)}(t_max + x_j),
/// the square root of a negative gap being purely imaginary.
inline std::vector<cplx> seed_from_asymptotics(const PainleveProblem& prob, double t_max) {
    prob.validate();
    const std::size_t k = prob.k();
    std::vector<cplx> state(2 * static_cast<std::size_t>(prob.n) * k);
    double mx = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double gap = prob.weight_gap(j);
        const cplx s = gap >= 0.0 ? cplx(std::sqrt(gap), 0.0) : cplx(0.0, std::sqrt(-gap));
        for (int m = 0; m < 2 * prob.n; ++m) {
            const cplx v = s * ai_n_deriv(prob.n, t_max + prob.x[j], m);
            state[static_cast<std::size_t>(m) * k + j] = v;
            mx = std::max(mx, std::abs(v));
        }
    }
    if (mx > seed_threshold)
        fail(ErrorKind::SeedTooLarge, "seed magnitude " + std::to_string(mx) + " at t_max = " + std::to_string(t_max) +
                                          " exceeds " + std::to_string(seed_threshold));
    return state;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

struct IntegratorTolerances {
    double abs_tol = 1e-18;
    double rel_tol = 1e-12;
    /// reporting grid points per unit t
    int grid_density = 128;
    std::size_t max_steps = 2000000;

    IntegratorTolerances tightened(double factor) const {
        IntegratorTolerances t = *this;
        t.abs_tol /= factor;
        t.rel_tol /= factor;
        return t;
    }
};

struct SolutionGrid {
    int n = 1;
    std::size_t k = 1;
    std::vector<double> x;
    std::vector<double> alpha;
    IntegratorTolerances tolerances;
    double t_max = 0.0;
    std::vector<double> t;                ///< descending from t_max
    std::vector<std::vector<cplx>> state; ///< per node, u_j^{(m)} at m*k + j
    /// trust window [t_trust, t_max]; t_trust = t_max when empty
    double t_trust = 0.0;
    double refinement_deviation = 0.0; ///< max |u - u_tight| on the trust window

    cplx u(std::size_t node, std::size_t j, int m = 0) const { return state[node][static_cast<std::size_t>(m) * k + j]; }

    /// <u, u> = sum_j u_j^2 (bilinear, no conjugation).
    cplx inner_uu(std::size_t node) const {
        cplx s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += u(node, j) * u(node, j);
        return s;
    }

    /// Index of the node at time tt (grid is uniform), or npos.
    std::size_t index_of(double tt) const {
        if (t.size() < 2) return static_cast<std::size_t>(-1);
        const double h = t[0] - t[1];
        const double pos = (t_max - tt) / h;
        const long idx = std::lround(pos);
        if (idx < 0 || static_cast<std::size_t>(idx) >= t.size() || std::abs(pos - idx) > 1e-6)
            return static_cast<std::size_t>(-1);
        return static_cast<std::size_t>(idx);
    }

    bool trusted(double tt) const { return tt >= t_trust - 1e-12 && tt <= t_max + 1e-12; }
};

namespace detail {

/// First-order real system: y = (Re, Im) of the complex state.
struct RealSystem {
    const CompiledRHS* rhs;
    const std::vector<double>* x;
    mutable std::vector<cplx> vars;
    mutable std::vector<cplx> top;

    void operator()(const std::vector<double>& y, std::vector<double>& dydt, double t) const {
        const std::size_t N = rhs->state_size();
        const std::size_t k = rhs->k();
        for (std::size_t i = 0; i < N; ++i) vars[i] = cplx(y[i], y[N + i]);
        vars[static_cast<std::size_t>(rhs->t_index())] = t;
        for (std::size_t j = 1; j <= k; ++j) vars[static_cast<std::size_t>(rhs->x_index(j))] = (*x)[j - 1];
        rhs->evaluate(vars.data(), top.data());
        // d/dt u^{(m)} = u^{(m+1)}
        for (std::size_t i = 0; i + k < N; ++i) {
            dydt[i] = y[i + k];
            dydt[N + i] = y[N + i + k];
        }
        for (std::size_t j = 0; j < k; ++j) {
            dydt[N - k + j] = top[j].real();
            dydt[2 * N - k + j] = top[j].imag();
        }
    }
};

inline std::vector<std::vector<cplx>> integrate_raw(const CompiledRHS& rhs, const std::vector<double>& x,
                                                    const std::vector<cplx>& seed, const std::vector<double>& times,
                                                    const IntegratorTolerances& tol) {
    namespace odeint = boost::numeric::odeint;
    using state_type = std::vector<double>;
    const std::size_t N = rhs.state_size();
    state_type y(2 * N);
    for (std::size_t i = 0; i < N; ++i) {
        y[i] = seed[i].real();
        y[N + i] = seed[i].imag();
    }
    RealSystem sys{&rhs, &x, std::vector<cplx>(static_cast<std::size_t>(rhs.variable_count())),
                   std::vector<cplx>(rhs.k())};
    std::vector<std::vector<cplx>> out;
    out.reserve(times.size());
    auto observer = [&](const state_type& s, double t) {
        std::vector<cplx> c(N);
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(s[i]) || !std::isfinite(s[N + i]) || std::abs(s[i]) + std::abs(s[N + i]) > 1e12)
                fail(ErrorKind::StepFailure, "solution blew up near t = " + std::to_string(t));
            c[i] = cplx(s[i], s[N + i]);
        }
        out.push_back(std::move(c));
    };
    auto stepper = odeint::make_controlled(tol.abs_tol, tol.rel_tol, odeint::runge_kutta_fehlberg78<state_type>());
    const double dt0 = -(times.size() > 1 ? std::abs(times[1] - times[0]) : 1e-3) / 4.0;
    try {
        odeint::integrate_times(stepper, sys, y, times.begin(), times.end(), dt0, observer,
                                odeint::max_step_checker(tol.max_steps));
    } catch (const odeint::step_adjustment_error& e) {
        fail(ErrorKind::StepFailure, std::string("step size control failed: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        fail(ErrorKind::StepFailure, std::string("integrator made no progress: ") + e.what());
    }
    return out;
}

} // namespace detail

struct IntegrateOptions {
    IntegratorTolerances tolerances{};
    /// tolerance factor of the refinement re-run
    double refinement_factor = 10.0;
    double refinement_tolerance = 1e-7;
    double reality_tolerance = 1e-6; ///< relative to max |u_j|
};

/// Uniform descending grid t_max, t_max - h, ..., down to t_min (inclusive if on grid).
inline std::vector<double> reporting_grid(double t_max, double t_min, int density) {
    if (!(t_min < t_max)) fail(ErrorKind::InvalidArgument, "t_min must be below t_max");
    if (density < 1) fail(ErrorKind::InvalidArgument, "grid density must be positive");
    const double h = 1.0 / density;
    const long steps = static_cast<long>(std::ceil((t_max - t_min) / h - 1e-9));
    std::vector<double> times(static_cast<std::size_t>(steps + 1));
    for (long i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = t_max - static_cast<double>(i) * h;
    return times;
}

/// Backward integration from the seed at t_max to t_min, with the trust-window
/// protocol: a re-run at tightened tolerances must agree, and the reality
/// pattern (real u_j for alpha_j > alpha_{j+1}, imaginary otherwise) must hold.
inline SolutionGrid integrate(const CompiledRHS& rhs, const PainleveProblem& prob, double t_max, double t_min,
                              const IntegrateOptions& opt = {}) {
    prob.validate();
    if (rhs.n() != prob.n || rhs.k() != prob.k())
        fail(ErrorKind::DimensionMismatch, "compiled RHS does not match the problem's (n, k)");
    const std::vector<cplx> seed = seed_from_asymptotics(prob, t_max);
    SolutionGrid grid;
    grid.n = prob.n;
    grid.k = prob.k();
    grid.x = prob.x;
    grid.alpha = prob.alpha;
    grid.tolerances = opt.tolerances;
    grid.t_max = t_max;
    grid.t = reporting_grid(t_max, t_min, opt.tolerances.grid_density);
    grid.state = detail::integrate_raw(rhs, prob.x, seed, grid.t, opt.tolerances);
    // the reporting grid caps the step size, so the re-run also doubles it to
    // take genuinely different steps
    IntegratorTolerances tight_tol = opt.tolerances.tightened(opt.refinement_factor);
    tight_tol.grid_density *= 2;
    const auto tight_full =
        detail::integrate_raw(rhs, prob.x, seed, reporting_grid(t_max, t_min, tight_tol.grid_density), tight_tol);
    std::vector<std::vector<cplx>> tight(grid.t.size());
    for (std::size_t i = 0; i < grid.t.size(); ++i) tight[i] = tight_full[std::min(2 * i, tight_full.size() - 1)];

    const std::size_t k = grid.k;
    std::vector<double> max_abs(k, 0.0);
    for (const auto& s : grid.state)
        for (std::size_t j = 0; j < k; ++j) max_abs[j] = std::max(max_abs[j], std::abs(s[j]));

    std::size_t last_good = 0;
    double deviation = 0.0;
    for (std::size_t i = 0; i < grid.t.size(); ++i) {
        bool ok = true;
        double dev = 0.0;
        for (std::size_t j = 0; j < k && ok; ++j) {
            const cplx a = grid.state[i][j], b = tight[i][j];
            dev = std::max(dev, std::abs(a - b));
            const double wrong = prob.weight_gap(j) > 0.0 ? std::abs(a.imag()) : std::abs(a.real());
            if (wrong > opt.reality_tolerance * max_abs[j]) ok = false;
        }
        if (dev > opt.refinement_tolerance) ok = false;
        if (!ok) break;
        deviation = std::max(deviation, dev);
        last_good = i;
    }
    grid.t_trust = grid.t[last_good];
    grid.refinement_deviation = deviation;
    if (last_good == 0) fail(ErrorKind::TrustWindowEmpty, "refinement re-run disagrees right below t_max");
    return grid;
}

/// compile_rhs + choose_t_max + integrate down to t_min.
inline SolutionGrid solve(const PainleveProblem& prob, double t_min = 0.0, const IntegrateOptions& opt = {}) {
    prob.validate();
    const CompiledRHS rhs = compile_rhs(hierarchy_member(prob.n, prob.k()));
    return integrate(rhs, prob, choose_t_max(prob), t_min, opt);
}

// ---------------------------------------------------------------------------
// Tracy-Widom integral
// ---------------------------------------------------------------------------

inline constexpr double tail_tolerance = 1e-6;

/// sum_j (alpha_j - alpha_{j+1}) int_{from}^inf t Ai_n(t + x_j)^2 dt.
inline double tw_tail(const PainleveProblem& prob, double from, double length = 25.0, int nodes = 160) {
    std::vector<double> ts, ws;
    gauss_legendre(static_cast<std::size_t>(nodes)).mapped(from, from + length, ts, ws);
    double total = 0.0;
    for (std::size_t j = 0; j < prob.k(); ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < ts.size(); ++q) {
            const double a = ai_n(prob.n, ts[q] + prob.x[j]);
            s += ws[q] * ts[q] * a * a;
        }
        total += prob.weight_gap(j) * s;
    }
    return total;
}

struct TwIntegral {
    double log_F = 0.0;
    double imag_residual = 0.0; ///< imaginary part of -int t <u,u>
    double tail = 0.0;
};

/// Composite Simpson on [0, t_max] from the uniform grid (closing with a 3/8
/// panel for an odd interval count), plus the linearized tail beyond t_max.
inline TwIntegral tw_integral(const SolutionGrid& grid, const PainleveProblem& prob) {
    const std::size_t i0 = grid.index_of(0.0);
    if (i0 == static_cast<std::size_t>(-1)) fail(ErrorKind::InvalidArgument, "solution grid does not reach t = 0");
    const double h = grid.t[0] - grid.t[1];
    auto f = [&](std::size_t i) { return grid.t[i] * grid.inner_uu(i); };
    const std::size_t intervals = i0; // nodes 0..i0
    cplx sum = 0.0;
    std::size_t simpson_end = intervals;
    if (intervals % 2 == 1) {
        if (intervals < 3) fail(ErrorKind::InvalidArgument, "grid too short for Simpson's rule");
        simpson_end = intervals - 3;
        sum += 3.0 * h / 8.0 * (f(simpson_end) + 3.0 * f(simpson_end + 1) + 3.0 * f(simpson_end + 2) + f(simpson_end + 3));
    }
    if (simpson_end > 0) {
        cplx s = f(0) + f(simpson_end);
        for (std::size_t i = 1; i < simpson_end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(i);
        sum += h / 3.0 * s;
    }
    TwIntegral r;
    r.tail = tw_tail(prob, grid.t_max);
    if (std::abs(r.tail) > tail_tolerance)
        fail(ErrorKind::TailTooLarge, "tail beyond t_max is " + std::to_string(r.tail));
    r.log_F = -(sum.real() + r.tail);
    r.imag_residual = -sum.imag();
    return r;
}

inline nlohmann::json grid_metadata(const SolutionGrid& g) {
    return {{"n", g.n},
            {"k", g.k},
            {"x", g.x},
            {"alpha", g.alpha},
            {"t_max", g.t_max},
            {"t_min", g.t.back()},
            {"trust_window", {g.t_trust, g.t_max}},
            {"refinement_deviation", g.refinement_deviation},
            {"abs_tol", g.tolerances.abs_tol},
            {"rel_tol", g.tolerances.rel_tol},
            {"grid_density", g.tolerances.grid_density}};
}

} // namespace hoairy

#endif // HOAIRY_PAINLEVE_HPP
