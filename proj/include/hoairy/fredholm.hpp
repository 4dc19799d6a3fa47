#ifndef HOAIRY_FREDHOLM_HPP
#define HOAIRY_FREDHOLM_HPP

// K_n(x, y) = int_0^inf Ai_n(x + z) Ai_n(y + z) dz and the generating function
// F_n(x + t, alpha) = det(I - sum_j alpha_j K_n|A_j), A_j = (x_j, x_{j-1}),
// by Nystrom discretization.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <list>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "airy.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace hoairy {

struct IntervalSystem {
    std::vector<double> thresholds; ///< x_1 > x_2 > ... > x_k
    std::vector<double> weights;    ///< alpha_1..alpha_k
    double shift = 0.0;             ///< t

    std::size_t k() const { return thresholds.size(); }

    /// alpha_j with alpha_{k+1} = 0; j is 1-based.
    double alpha(std::size_t j) const { return j >= 1 && j <= k() ? weights[j - 1] : 0.0; }

    /// Thresholds must be strictly decreasing and weights in [0, 1].
    void validate() const {
        if (thresholds.empty()) fail(ErrorKind::InvalidArgument, "interval system needs at least one threshold");
        if (weights.size() != thresholds.size())
            fail(ErrorKind::DimensionMismatch, "thresholds and weights have different lengths");
        for (std::size_t j = 0; j < k(); ++j) {
            if (!std::isfinite(thresholds[j])) fail(ErrorKind::InvalidArgument, "thresholds must be finite");
            if (j > 0 && !(thresholds[j] < thresholds[j - 1]))
                fail(ErrorKind::InvalidArgument, "thresholds must be strictly decreasing");
            if (!(weights[j] >= 0.0 && weights[j] <= 1.0))
                fail(ErrorKind::InvalidArgument, "weights must lie in [0, 1]");
        }
        if (!std::isfinite(shift)) fail(ErrorKind::InvalidArgument, "shift must be finite");
    }

    IntervalSystem shifted(double dt) const {
        IntervalSystem s = *this;
        s.shift += dt;
        return s;
    }
};

enum class Truncation { Exponential, Hard };

inline const char* to_string(Truncation t) { return t == Truncation::Exponential ? "exponential" : "hard"; }

struct NystromOptions {
    int nodes_per_interval = 40;
    int z_nodes = 160;
    Truncation truncation = Truncation::Exponential;
    /// length of the Gauss-Legendre part of the unbounded interval
    double hard_cutoff = 14.0;
    /// exponential-substitution nodes beyond it
    int tail_nodes = 10;
    bool use_cache = true;

    NystromOptions doubled() const {
        NystromOptions o = *this;
        o.nodes_per_interval *= 2;
        o.tail_nodes *= 2;
        return o;
    }
};

struct NystromSystem {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> alpha_at_node;
    Eigen::MatrixXd matrix; ///< delta_pq - sqrt(alpha_p w_p) K(s_p, s_q) sqrt(alpha_q w_q)
    double z_max = 0.0;
};

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

inline double kernel_z_max(double min_argument) { return 16.0 + std::max(0.0, -min_argument); }

namespace detail {

/// Ai_n(s_p + z_i) for all nodes, plus z-weights.
struct AiryTable {
    Eigen::MatrixXd values; ///< rows: points, cols: z nodes
    Eigen::VectorXd z_weights;
};

inline AiryTable airy_table(int n, const std::vector<double>& points, double z_max, int z_nodes) {
    const ContourSpec contour = ContourSpec::standard(n);
    std::vector<double> z, wz;
    gauss_legendre(static_cast<std::size_t>(z_nodes)).mapped(0.0, z_max, z, wz);
    AiryTable table;
    table.values.resize(static_cast<Eigen::Index>(points.size()), z_nodes);
    table.z_weights = Eigen::Map<Eigen::VectorXd>(wz.data(), z_nodes);
    for (std::size_t p = 0; p < points.size(); ++p)
        for (int i = 0; i < z_nodes; ++i)
            table.values(static_cast<Eigen::Index>(p), i) = ai_n(n, points[p] + z[static_cast<std::size_t>(i)], contour);
    return table;
}

/// Bound on the neglected z-tail: |Ai_n| at the truncation point for both arguments.
inline double kernel_tail(int n, double x, double y, double z_max) {
    return std::abs(ai_n(n, x + z_max)) * std::abs(ai_n(n, y + z_max));
}

} // namespace detail

inline constexpr double kernel_tail_tolerance = 1e-12;

/// K_n(x, y) by Gauss-Legendre in z on [0, Z_max], Z_max = 16 + max(0, -min(x, y)).
inline double kernel_eval(int n, double x, double y, int z_nodes = 160) {
    const double z_max = kernel_z_max(std::min(x, y));
    if (detail::kernel_tail(n, x, y, z_max) > kernel_tail_tolerance)
        fail(ErrorKind::NonConvergence, "kernel z-tail too large");
    detail::AiryTable t = detail::airy_table(n, {x, y}, z_max, z_nodes);
    // same node set for both arguments makes the result symmetric bit for bit
    double sum = 0.0;
    for (int i = 0; i < z_nodes; ++i) sum += t.z_weights(i) * (t.values(0, i) * t.values(1, i));
    return sum;
}

struct DoubleContourValue {
    double value = 0.0;
    double imag_residual = 0.0;
};

/// (i/(2pi)^2) int_{Gamma+} int_{Gamma-} exp(i(psi(l;x) - psi(m;y)))/(l - m) dm dl,
/// Gamma+ raised above the real axis, Gamma- its mirror image.
inline DoubleContourValue kernel_eval_doublecontour_full(int n, double x, double y, int nodes_per_ray = 200) {
    ContourSpec spec = ContourSpec::standard(n);
    spec.nodes_per_ray = nodes_per_ray;
    const GaussLegendre& rule = gauss_legendre(static_cast<std::size_t>(nodes_per_ray));
    const cplx I(0.0, 1.0);

    struct Node {
        cplx point;
        cplx weight; // includes dl and the integrand factor
    };
    auto contour_nodes = [&](double arg, bool upper) {
        const double R = spec.radius_for(arg);
        const double c = std::max(0.5, spec.apex_for(arg));
        std::vector<Node> out;
        for (int ray = 0; ray < 2; ++ray) {
            const double theta = ray == 0 ? spec.angle_out : spec.angle_in;
            const double sign = ray == 0 ? 1.0 : -1.0;
            const cplx dir = upper ? std::polar(1.0, theta) : std::polar(1.0, -theta);
            const cplx apex = upper ? cplx(0.0, c) : cplx(0.0, -c);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double r = 0.5 * R * (rule.nodes[q] + 1.0);
                const cplx lam = apex + r * dir;
                const cplx e = upper ? std::exp(I * phase(n, lam, arg)) : std::exp(-I * phase(n, lam, arg));
                out.push_back({lam, sign * 0.5 * R * rule.weights[q] * dir * e});
            }
        }
        return out;
    };
    const std::vector<Node> plus = contour_nodes(x, true);
    const std::vector<Node> minus = contour_nodes(y, false);
    cplx total = 0.0;
    for (const Node& l : plus) {
        cplx inner = 0.0;
        for (const Node& m : minus) inner += m.weight / (l.point - m.point);
        total += l.weight * inner;
    }
    total *= I / (4.0 * std::numbers::pi * std::numbers::pi);
    return {total.real(), total.imag()};
}

inline double kernel_eval_doublecontour(int n, double x, double y) {
    DoubleContourValue v = kernel_eval_doublecontour_full(n, x, y);
    if (std::abs(v.imag_residual) > 1e-9)
        fail(ErrorKind::NonConvergence, "double-contour kernel has imaginary residual " + std::to_string(v.imag_residual));
    return v.value;
}

// ---------------------------------------------------------------------------
// Nystrom
// ---------------------------------------------------------------------------

/// Kernel matrices K(s_p, s_q) keyed by (n, z node count, node set). The node
/// set does not depend on the weights, so sweeps over alpha reuse entries.
class KernelCache {
public:
    explicit KernelCache(std::size_t capacity = 16) : capacity_(capacity) {}

    template <class Compute>
    Eigen::MatrixXd get(int n, int z_nodes, const std::vector<double>& nodes, Compute&& compute) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            for (auto it = entries_.begin(); it != entries_.end(); ++it) {
                if (it->n == n && it->z_nodes == z_nodes && it->nodes.size() == nodes.size() &&
                    std::memcmp(it->nodes.data(), nodes.data(), nodes.size() * sizeof(double)) == 0) {
                    entries_.splice(entries_.begin(), entries_, it);
                    ++hits_;
                    return entries_.front().kernel;
                }
            }
        }
        Eigen::MatrixXd kernel = compute();
        std::lock_guard<std::mutex> lock(mutex_);
        entries_.push_front({n, z_nodes, nodes, kernel});
        if (entries_.size() > capacity_) entries_.pop_back();
        return kernel;
    }

    std::size_t hits() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return hits_;
    }
    void clear() {
        std::lock_guard<std::mutex> lock(mutex_);
        entries_.clear();
        hits_ = 0;
    }

    static KernelCache& global() {
        static KernelCache cache;
        return cache;
    }

private:
    struct Entry {
        int n;
        int z_nodes;
        std::vector<double> nodes;
        Eigen::MatrixXd kernel;
    };
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<Entry> entries_;
    std::size_t hits_ = 0;
};

inline NystromSystem build_nystrom(const IntervalSystem& system, int n, const NystromOptions& opt = {}) {
    system.validate();
    if (n < 1) fail(ErrorKind::InvalidArgument, "order n must be >= 1");
    if (opt.nodes_per_interval < 1 || opt.z_nodes < 1 || opt.tail_nodes < 1 || !(opt.hard_cutoff > 0.0))
        fail(ErrorKind::InvalidArgument, "node counts must be positive");
    const std::size_t k = system.k();
    const std::size_t m = static_cast<std::size_t>(opt.nodes_per_interval);
    const GaussLegendre& rule = gauss_legendre(m);
    const double t = system.shift;

    NystromSystem ns;
    ns.nodes.reserve(k * m);
    std::vector<double> x, w;
    // A_1 + t = (x_1 + t, inf): Gauss-Legendre on [x_1 + t, x_1 + t + L], then in
    // exponential mode s = x_1 + t + L - log(1 - xi) on the remainder. A pure
    // exponential map crowds the oscillating right tail of Ai_n (n >= 2) into xi -> 1.
    const double a1 = system.thresholds[0] + t;
    rule.mapped(a1, a1 + opt.hard_cutoff, x, w);
    ns.nodes.insert(ns.nodes.end(), x.begin(), x.end());
    ns.weights.insert(ns.weights.end(), w.begin(), w.end());
    std::size_t first = m;
    if (opt.truncation == Truncation::Exponential) {
        const std::size_t mt = static_cast<std::size_t>(opt.tail_nodes);
        gauss_legendre(mt).mapped(0.0, 1.0, x, w);
        for (std::size_t q = 0; q < mt; ++q) {
            ns.nodes.push_back(a1 + opt.hard_cutoff - std::log1p(-x[q]));
            ns.weights.push_back(w[q] / (1.0 - x[q]));
        }
        first += mt;
    }
    ns.alpha_at_node.assign(first, system.weights[0]);
    for (std::size_t j = 1; j < k; ++j) {
        rule.mapped(system.thresholds[j] + t, system.thresholds[j - 1] + t, x, w);
        ns.nodes.insert(ns.nodes.end(), x.begin(), x.end());
        ns.weights.insert(ns.weights.end(), w.begin(), w.end());
        ns.alpha_at_node.insert(ns.alpha_at_node.end(), m, system.weights[j]);
    }

    const double min_node = *std::min_element(ns.nodes.begin(), ns.nodes.end());
    ns.z_max = kernel_z_max(min_node);
    auto compute = [&] {
        detail::AiryTable table = detail::airy_table(n, ns.nodes, ns.z_max, opt.z_nodes);
        return Eigen::MatrixXd(table.values * table.z_weights.asDiagonal() * table.values.transpose());
    };
    Eigen::MatrixXd kernel =
        opt.use_cache ? KernelCache::global().get(n, opt.z_nodes, ns.nodes, compute) : compute();

    const Eigen::Index N = static_cast<Eigen::Index>(ns.nodes.size());
    Eigen::VectorXd scale(N);
    for (Eigen::Index p = 0; p < N; ++p)
        scale(p) = std::sqrt(ns.alpha_at_node[static_cast<std::size_t>(p)] * ns.weights[static_cast<std::size_t>(p)]);
    ns.matrix = Eigen::MatrixXd::Identity(N, N) - scale.asDiagonal() * kernel * scale.asDiagonal();
    // exact symmetry, since the kernel table product can differ in the last bit
    ns.matrix = (0.5 * (ns.matrix + ns.matrix.transpose())).eval();
    return ns;
}

/// Determinant of the Nystrom matrix by partial-pivot LU.
inline double nystrom_determinant(const NystromSystem& ns) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ns.matrix);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det <= 0.0)
        fail(ErrorKind::NumericalBreakdown, "Nystrom determinant is not positive: " + std::to_string(det));
    return det;
}

/// F_n(x + t, alpha).
inline double gen_fn(const IntervalSystem& system, int n, const NystromOptions& opt = {}) {
    if (std::all_of(system.weights.begin(), system.weights.end(), [](double a) { return a == 0.0; })) {
        system.validate();
        return 1.0;
    }
    return nystrom_determinant(build_nystrom(system, n, opt));
}

struct GenFnReport {
    double F = 1.0;
    double log_F = 0.0;
    double error_estimate = 0.0; ///< |F(nodes) - F(2 nodes)|
    int nodes = 0;
    Truncation truncation = Truncation::Exponential;
    double z_max = 0.0;
};

/// F with a node-doubling error estimate.
inline GenFnReport gen_fn_report(const IntervalSystem& system, int n, const NystromOptions& opt = {}) {
    GenFnReport r;
    r.nodes = opt.nodes_per_interval;
    r.truncation = opt.truncation;
    r.F = gen_fn(system, n, opt);
    r.log_F = std::log(r.F);
    r.error_estimate = std::abs(gen_fn(system, n, opt.doubled()) - r.F);
    double min_node = system.thresholds.back() + system.shift;
    r.z_max = kernel_z_max(min_node);
    return r;
}

/// Eigenvalues of sum_j sqrt(alpha) K|A_j sqrt(alpha) (i.e. of I - matrix), ascending.
inline Eigen::VectorXd nystrom_operator_eigenvalues(const NystromSystem& ns) {
    const Eigen::Index N = ns.matrix.rows();
    Eigen::MatrixXd op = Eigen::MatrixXd::Identity(N, N) - ns.matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorKind::NumericalBreakdown, "eigenvalue solver failed");
    return solver.eigenvalues();
}

// ---------------------------------------------------------------------------
// Derivatives
// ---------------------------------------------------------------------------

struct DerivativeEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// d^2/dt^2 log F_n(x + t, alpha) by the central 5-point stencil, with the
/// Richardson estimate |D(h) - D(2h)|/15.
inline DerivativeEstimate log_gen_fn_d2t(const IntervalSystem& system, int n, double h = 0.05,
                                         const NystromOptions& opt = {}) {
    if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "stencil step must be positive");
    std::vector<double> logs(9);
    for (int s = -4; s <= 4; ++s) {
        if (s % 2 != 0 && std::abs(s) > 2) continue; // +-3 not needed
        try {
            logs[static_cast<std::size_t>(s + 4)] = std::log(gen_fn(system.shifted(s * h), n, opt));
        } catch (const Error& e) {
            fail(ErrorKind::StencilFailure, "F evaluation failed at stencil offset " + std::to_string(s) + ": " + e.what());
        }
    }
    auto L = [&](int s) { return logs[static_cast<std::size_t>(s + 4)]; };
    auto stencil = [&](int stride, double step) {
        return (-L(2 * stride) + 16.0 * L(stride) - 30.0 * L(0) + 16.0 * L(-stride) - L(-2 * stride)) /
               (12.0 * step * step);
    };
    const double fine = stencil(1, h);
    const double coarse = stencil(2, 2.0 * h);
    return {fine, std::abs(fine - coarse) / 15.0};
}

/// Finite-difference weights for the d-th derivative at x0 from the points xs
/// (Fornberg's recursion).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int d) {
    const int N = static_cast<int>(xs.size()) - 1;
    if (d < 0 || d > N) fail(ErrorKind::StencilFailure, "stencil too short for derivative order");
    std::vector<std::vector<double>> c(static_cast<std::size_t>(N + 1), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= N; ++i) {
        int mn = std::min(i, d);
        double c2 = 1.0, c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] =
                        c1 * (s * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(s - 1)] -
                              c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(s)]) / c2;
                c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int s = mn; s >= 1; --s)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] -
                     s * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(s - 1)]) / c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(N + 1));
    for (int i = 0; i <= N; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    return w;
}

struct JointProbOptions {
    double d_alpha = 0.05;
    /// points beyond the minimum d+1 in each one-sided stencil
    int extra_points = 4;
    NystromOptions nystrom{};
};

struct JointProbResult {
    double value = 0.0;
    double error_estimate = 0.0; ///< difference to the same sum with d_alpha doubled
    int terms = 0;
};

namespace detail {

/// Sum over admissible (j_1..j_k) of (-1)^{|j|}/prod j! * d^j F at alpha = 1.
inline double joint_prob_sum(const IntervalSystem& base, int n, const std::vector<int>& m, double h,
                             const JointProbOptions& opt, int* terms) {
    const std::size_t k = base.k();
    int max_order = m.back() - 1;
    // one-sided stencils: point index i -> alpha = 1 - i h
    const int npts = max_order + 1 + opt.extra_points;
    std::vector<double> xs(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) xs[static_cast<std::size_t>(i)] = 1.0 - i * h;
    if (xs.back() < 0.0) fail(ErrorKind::StencilFailure, "alpha stencil leaves [0, 1]; reduce d_alpha");
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(max_order + 1));
    for (int d = 0; d <= max_order; ++d) {
        weights[static_cast<std::size_t>(d)] = fd_weights(1.0, std::vector<double>(xs.begin(), xs.begin() + d + 1 + opt.extra_points), d);
    }

    // F on the tensor grid, memoized by multi-index
    std::map<std::vector<int>, double> cache;
    auto F_at = [&](const std::vector<int>& idx) {
        auto it = cache.find(idx);
        if (it != cache.end()) return it->second;
        IntervalSystem s = base;
        for (std::size_t j = 0; j < k; ++j) s.weights[j] = xs[static_cast<std::size_t>(idx[j])];
        double v;
        try {
            v = gen_fn(s, n, opt.nystrom);
        } catch (const Error& e) {
            fail(ErrorKind::StencilFailure, std::string("F evaluation failed inside alpha stencil: ") + e.what());
        }
        cache.emplace(idx, v);
        return v;
    };

    double total = 0.0;
    int count = 0;
    std::vector<int> j(k, 0);
    // enumerate j with partial sums j_1 + .. + j_l < m_l
    std::function<void(std::size_t, int)> rec = [&](std::size_t level, int partial) {
        if (level == k) {
            // mixed derivative by tensor-product stencil
            double deriv = 0.0;
            std::vector<int> idx(k, 0);
            std::function<void(std::size_t, double)> tensor = [&](std::size_t l, double w) {
                if (l == k) {
                    deriv += w * F_at(idx);
                    return;
                }
                const auto& wl = weights[static_cast<std::size_t>(j[l])];
                for (std::size_t i = 0; i < wl.size(); ++i) {
                    idx[l] = static_cast<int>(i);
                    tensor(l + 1, w * wl[i]);
                }
            };
            tensor(0, 1.0);
            double coef = 1.0;
            int sum = 0;
            for (int jl : j) {
                sum += jl;
                coef /= std::tgamma(jl + 1.0);
            }
            if (sum % 2 == 1) coef = -coef;
            total += coef * deriv;
            ++count;
            return;
        }
        for (int v = 0; partial + v < m[level]; ++v) {
            j[level] = v;
            rec(level + 1, partial + v);
        }
        j[level] = 0;
    };
    rec(0, 0);
    if (terms) *terms = count;
    return total;
}

} // namespace detail

/// P(zeta_{m_1} < x_1, ..., zeta_{m_k} < x_k) from alpha-derivatives of F at alpha = 1.
inline JointProbResult joint_prob(const IntervalSystem& system, int n, const std::vector<int>& orders,
                                  const JointProbOptions& opt = {}) {
    if (orders.size() != system.k()) fail(ErrorKind::DimensionMismatch, "need one order per threshold");
    for (std::size_t j = 0; j < orders.size(); ++j) {
        if (orders[j] < 1) fail(ErrorKind::InvalidArgument, "particle orders must be >= 1");
        if (j > 0 && orders[j] <= orders[j - 1]) fail(ErrorKind::InvalidArgument, "particle orders must increase");
    }
    if (orders.back() - 1 > 4) fail(ErrorKind::InvalidArgument, "total derivative order above 4 is not supported");
    if (!(opt.d_alpha > 0.0)) fail(ErrorKind::InvalidArgument, "d_alpha must be positive");
    IntervalSystem base = system;
    std::fill(base.weights.begin(), base.weights.end(), 1.0);
    base.validate();
    JointProbResult r;
    r.value = detail::joint_prob_sum(base, n, orders, opt.d_alpha, opt, &r.terms);
    r.error_estimate = std::abs(detail::joint_prob_sum(base, n, orders, 0.5 * opt.d_alpha, opt, nullptr) - r.value);
    return r;
}

inline nlohmann::json to_json(const GenFnReport& r) {
    return {{"F", r.F},
            {"log_F", r.log_F},
            {"error_estimate", r.error_estimate},
            {"nodes", r.nodes},
            {"truncation", to_string(r.truncation)},
            {"z_max", r.z_max}};
}

} // namespace hoairy

#endif // HOAIRY_FREDHOLM_HPP
