#ifndef HOAIRY_HIERARCHY_HPP
#define HOAIRY_HIERARCHY_HPP

// Lenard-type operators L+ and L-, the vector Painleve II hierarchy
// (L+ L-)^n u = -diag(x_j + t) u, and the Lax matrices A(lambda), B(lambda)
// whose compatibility reproduces it.

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffring.hpp"
#include "errors.hpp"

namespace hoairy {

namespace detail {

inline void require_dimension(std::size_t k) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "vector dimension k must be >= 1");
}

inline DiffPoly antiderivative_labeled(const DiffPoly& p, const std::string& label) {
    try {
        return formal_antiderivative(p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotExact) throw;
        fail(ErrorKind::NotExact, label + " is not in Im(D): " + e.what());
    }
}

} // namespace detail

/// L+ v = i D v - i (D^{-1}{u, v}) u - 2i (D^{-1}<u, v>) u, with u = (u_1..u_k).
inline VecDiffPoly lenard_plus(const VecDiffPoly& v) {
    const std::size_t k = v.size();
    detail::require_dimension(k);
    const VecDiffPoly u = VecDiffPoly::u(k);
    const GaussRational I = GaussRational::i();

    DiffPoly inner_int = detail::antiderivative_labeled(inner(u, v), "<u,v>");
    MatDiffPoly bracket = sym_bracket(u, v);
    MatDiffPoly bracket_int(k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            bracket_int(a, b) = detail::antiderivative_labeled(
                bracket(a, b), "{u,v}(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");

    VecDiffPoly out = I * total_derivative(v);
    out -= I * (bracket_int * u);
    out -= (GaussRational(2) * I) * (inner_int * u);
    return out;
}

/// L- v = i D v + i (D^{-1}[u, v]) u.
inline VecDiffPoly lenard_minus(const VecDiffPoly& v) {
    const std::size_t k = v.size();
    detail::require_dimension(k);
    const VecDiffPoly u = VecDiffPoly::u(k);
    const GaussRational I = GaussRational::i();

    MatDiffPoly bracket = antisym_bracket(u, v);
    MatDiffPoly bracket_int(k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            bracket_int(a, b) = detail::antiderivative_labeled(
                bracket(a, b), "[u,v](" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");

    VecDiffPoly out = I * total_derivative(v);
    out += I * (bracket_int * u);
    return out;
}

/// diag(x_j + t) u as a vector.
inline VecDiffPoly shift_times_u(std::size_t k) {
    VecDiffPoly r(k);
    for (std::size_t j = 0; j < k; ++j) {
        int c = static_cast<int>(j) + 1;
        r[j] = (DiffPoly::x(c) + DiffPoly::t()) * DiffPoly::u(c);
    }
    return r;
}

/// One member of the hierarchy: lhs = (L+ L-)^n u and rhs = -diag(x_j + t) u.
struct HierarchyMember {
    int n = 1;
    std::size_t k = 1;
    VecDiffPoly lhs;
    VecDiffPoly rhs;

    /// lhs - rhs, the vector that vanishes on solutions.
    VecDiffPoly equation() const { return lhs - rhs; }

    friend bool operator==(const HierarchyMember& a, const HierarchyMember& b) {
        return a.n == b.n && a.k == b.k && a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

/// Builds the member by direct operator composition, alternating L- and L+
/// starting from u.
inline HierarchyMember hierarchy_member(int n, std::size_t k) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "hierarchy order n must be >= 1");
    detail::require_dimension(k);
    VecDiffPoly v = VecDiffPoly::u(k);
    for (int step = 0; step < n; ++step) v = lenard_plus(lenard_minus(v));
    return {n, k, std::move(v), -shift_times_u(k)};
}

// ---------------------------------------------------------------------------
// Lax chain
// ---------------------------------------------------------------------------

/// Block coefficients of A(lambda) = sum_j A_j lambda^{2n-j} + hat A_{2n}.
/// a11: scalar, a12: 1 x k row, a21: k x 1 column, a22: k x k.
struct LaxBlock {
    DiffPoly a11;
    MatDiffPoly a12;
    MatDiffPoly a21;
    MatDiffPoly a22;
};

struct LenardChain {
    int n = 1;
    std::size_t k = 1;
    /// blocks[j] for j = 0..2n, plus blocks[2n+1] whose a21 is the recursion's
    /// next vector (only a21 is populated there; it closes the hierarchy).
    std::vector<LaxBlock> blocks;
    /// Diagonal of hat A_{2n}, length k+1, degree-1 polynomials in t and x.
    std::vector<DiffPoly> hat_diagonal;

    const LaxBlock& operator[](std::size_t j) const { return blocks.at(j); }

    /// a_{2n+1}^{21} from the recursion, equal to i (L+ L-)^n u on the chain route.
    const MatDiffPoly& closing_a21() const { return blocks.at(2 * static_cast<std::size_t>(n) + 1).a21; }

    /// The (k+1) x (k+1) matrix A_j assembled from its blocks.
    MatDiffPoly matrix(std::size_t j) const {
        MatDiffPoly m(k + 1);
        if (j > 2 * static_cast<std::size_t>(n)) return m;
        const LaxBlock& b = blocks.at(j);
        m(0, 0) = b.a11;
        for (std::size_t c = 0; c < k; ++c) {
            m(0, c + 1) = b.a12(0, c);
            m(c + 1, 0) = b.a21(c, 0);
            for (std::size_t d = 0; d < k; ++d) m(c + 1, d + 1) = b.a22(c, d);
        }
        return m;
    }

    MatDiffPoly hat_matrix() const {
        MatDiffPoly m(k + 1);
        for (std::size_t j = 0; j <= k; ++j) m(j, j) = hat_diagonal[j];
        return m;
    }
};

/// B(lambda) = B1 lambda + B0.
struct BMatrix {
    std::size_t k = 1;
    MatDiffPoly b1;
    MatDiffPoly b0;

    static BMatrix build(std::size_t k) {
        detail::require_dimension(k);
        const GaussRational I = GaussRational::i();
        const GaussRational scale = I / GaussRational(static_cast<long>(k) + 1);
        BMatrix b{k, MatDiffPoly(k + 1), MatDiffPoly(k + 1)};
        b.b1(0, 0) = DiffPoly(-GaussRational(static_cast<long>(k)) * scale);
        for (std::size_t j = 1; j <= k; ++j) b.b1(j, j) = DiffPoly(scale);
        for (std::size_t j = 1; j <= k; ++j) {
            DiffPoly uj = DiffPoly::u(static_cast<int>(j));
            b.b0(0, j) = -I * uj;
            b.b0(j, 0) = I * uj;
        }
        return b;
    }
};

/// Runs the recursion
///   a_{j+1}^{21} = -i D a_j^{21} - a_j^{11} u + a_j^{22} u
///   a_{j+1}^{22} = i sum_{l=1}^{j} (a_l^{22} a_{j+1-l}^{22} + a_l^{21} a_{j+1-l}^{12})
/// from a_1^{21} = i u, a_1^{22} = 0, with a_j^{11} = -tr a_j^{22} and
/// a_j^{12} = (-1)^j (a_j^{21})^T.
inline LenardChain lax_chain(int n, std::size_t k) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "hierarchy order n must be >= 1");
    detail::require_dimension(k);
    const GaussRational I = GaussRational::i();
    const MatDiffPoly u = MatDiffPoly::column(VecDiffPoly::u(k));
    const std::size_t top = 2 * static_cast<std::size_t>(n);
    const long kk = static_cast<long>(k);

    LenardChain chain;
    chain.n = n;
    chain.k = k;
    chain.blocks.resize(top + 2);

    LaxBlock& a0 = chain.blocks[0];
    a0.a11 = DiffPoly(-GaussRational(kk) * I / GaussRational(kk + 1));
    a0.a12 = MatDiffPoly(1, k);
    a0.a21 = MatDiffPoly(k, 1);
    a0.a22 = (I / GaussRational(kk + 1)) * MatDiffPoly::identity(k);

    auto finish_block = [&](std::size_t j) {
        LaxBlock& b = chain.blocks[j];
        b.a11 = -b.a22.trace();
        b.a12 = (j % 2 == 0 ? GaussRational(1) : GaussRational(-1)) * b.a21.transpose();
    };

    chain.blocks[1].a21 = I * u;
    chain.blocks[1].a22 = MatDiffPoly(k);
    finish_block(1);

    for (std::size_t j = 1; j <= top; ++j) {
        const LaxBlock& cur = chain.blocks[j];
        LaxBlock& next = chain.blocks[j + 1];
        next.a21 = (-I) * total_derivative(cur.a21) - cur.a11 * u + cur.a22 * u;
        if (j + 1 > top) break;
        MatDiffPoly conv(k);
        for (std::size_t l = 1; l <= j; ++l) {
            const LaxBlock& left = chain.blocks[l];
            const LaxBlock& right = chain.blocks[j + 1 - l];
            conv += left.a22 * right.a22;
            conv += left.a21 * right.a12;
        }
        next.a22 = I * conv;
        finish_block(j + 1);
    }

    // hat A_{2n} = i/(k+1) diag(-k t - sum x, t + k x_1 - sum_{j != 1} x_j, ...)
    DiffPoly sum_x;
    for (std::size_t j = 1; j <= k; ++j) sum_x += DiffPoly::x(static_cast<int>(j));
    const GaussRational scale = I / GaussRational(kk + 1);
    chain.hat_diagonal.resize(k + 1);
    chain.hat_diagonal[0] = scale * (GaussRational(-kk) * DiffPoly::t() - sum_x);
    for (std::size_t j = 1; j <= k; ++j) {
        DiffPoly xj = DiffPoly::x(static_cast<int>(j));
        chain.hat_diagonal[j] = scale * (DiffPoly::t() + GaussRational(kk) * xj - (sum_x - xj));
    }
    return chain;
}

/// The hierarchy member read off the chain: lhs = -i a_{2n+1}^{21}.
inline HierarchyMember member_from_chain(const LenardChain& chain) {
    VecDiffPoly lhs = (-GaussRational::i()) * chain.closing_a21().as_vector();
    return {chain.n, chain.k, std::move(lhs), -shift_times_u(chain.k)};
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

struct IdentityCheck {
    std::string name;
    MatDiffPoly residual;
    bool exact() const { return residual.is_zero(); }
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;

    void add(std::string name, MatDiffPoly residual) { checks.push_back({std::move(name), std::move(residual)}); }
    void add(std::string name, const DiffPoly& residual) { add(std::move(name), MatDiffPoly::scalar(residual)); }

    bool all_exact() const {
        return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.exact(); });
    }
    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [](const IdentityCheck& c) { return !c.exact(); }));
    }
    void append(const IdentityReport& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }

    /// Throws IdentityViolation naming the first failing equation.
    void require() const {
        for (const auto& c : checks) {
            if (c.exact()) continue;
            std::ostringstream os;
            os << "identity '" << c.name << "' has nonzero residual";
            for (std::size_t r = 0; r < c.residual.rows(); ++r)
                for (std::size_t q = 0; q < c.residual.cols(); ++q)
                    if (!c.residual(r, q).is_zero())
                        os << " [" << r + 1 << "," << q + 1 << "]: " << c.residual(r, q).str();
            fail(ErrorKind::IdentityViolation, os.str());
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json entry = {{"identity", c.name}, {"exact", c.exact()}};
            if (!c.exact()) entry["residual"] = hoairy::to_json(c.residual);
            arr.push_back(entry);
        }
        return arr;
    }
};

namespace detail {

inline MatDiffPoly m_times_u(std::size_t k) { return MatDiffPoly::column(shift_times_u(k)); }

inline MatDiffPoly commutator(const MatDiffPoly& a, const MatDiffPoly& b) { return a * b - b * a; }

} // namespace detail

/// Block equations of the zero-curvature condition plus the full matrix
/// identity A B - B A = dB/dlambda - dA/dt, coefficient by coefficient in lambda.
/// Equations of the lambda^0 coefficient involving m_{t,x} are checked modulo
/// the hierarchy equation E = lhs - rhs of `member`: their residual must be
/// exactly -E (or -E^T).
inline IdentityReport verify_compatibility(const LenardChain& chain, const HierarchyMember& member) {
    if (member.n != chain.n || member.k != chain.k)
        fail(ErrorKind::DimensionMismatch, "chain and hierarchy member have different (n, k)");
    const std::size_t k = chain.k;
    const std::size_t top = 2 * static_cast<std::size_t>(chain.n);
    const GaussRational I = GaussRational::i();
    const MatDiffPoly u = MatDiffPoly::column(VecDiffPoly::u(k));
    const MatDiffPoly ut = u.transpose();
    const MatDiffPoly mu = detail::m_times_u(k);
    const MatDiffPoly E = MatDiffPoly::column(member.equation());

    IdentityReport report;
    report.add("first block: a1^12 = -i u^T", chain[1].a12 - (-I) * ut);
    report.add("first block: a1^21 = i u", chain[1].a21 - I * u);

    for (std::size_t j = 1; j <= top; ++j) {
        const LaxBlock& a = chain[j];
        const std::string tag = (j < top ? "block j=" : "last block j=") + std::to_string(j);
        // (1,1) and (2,2) equations hold identically for every j.
        DiffPoly r11 = total_derivative(a.a11) + I * ((ut * a.a21)(0, 0) + (a.a12 * u)(0, 0));
        report.add(tag + ": D a^11 = -i(u^T a^21 + a^12 u)", r11);
        MatDiffPoly r22 = total_derivative(a.a22) - I * (u * a.a12 + a.a21 * ut);
        report.add(tag + ": D a^22 = i(u a^12 + a^21 u^T)", r22);
        if (j < top) {
            const LaxBlock& b = chain[j + 1];
            MatDiffPoly r12 = total_derivative(a.a12) + I * (b.a12 + ut * a.a22 - a.a11 * ut);
            report.add(tag + ": D a^12 = -i(a_{j+1}^12 + u^T a^22 - a^11 u^T)", r12);
            MatDiffPoly r21 = total_derivative(a.a21) - I * (b.a21 + a.a11 * u - a.a22 * u);
            report.add(tag + ": D a^21 = i(a_{j+1}^21 + a^11 u - a^22 u)", r21);
        } else {
            MatDiffPoly r12 = total_derivative(a.a12) + I * (ut * a.a22 - a.a11 * ut + I * mu.transpose());
            report.add(tag + ": D a^12 = -i(u^T a^22 - a^11 u^T + i u^T m) mod hierarchy", r12 + E.transpose());
            MatDiffPoly r21 = total_derivative(a.a21) - I * (a.a11 * u - a.a22 * u - I * mu);
            report.add(tag + ": D a^21 = i(a^11 u - a^22 u - i m u) mod hierarchy", r21 + E);
        }
    }

    // Lenard form of the chain: a_{2j}^21 = -L- a_{2j-1}^21, a_{2j+1}^21 = -L+ a_{2j}^21,
    // and the closing equation -L+ a_{2n}^21 = -i m u.
    for (std::size_t j = 1; 2 * j <= top; ++j) {
        VecDiffPoly odd = chain[2 * j - 1].a21.as_vector();
        VecDiffPoly even = chain[2 * j].a21.as_vector();
        report.add("a21 recursion: a_" + std::to_string(2 * j) + "^21 = -L- a_" + std::to_string(2 * j - 1) + "^21",
                   MatDiffPoly::column(even + lenard_minus(odd)));
        VecDiffPoly plus = -lenard_plus(even);
        if (2 * j < top) {
            VecDiffPoly next = chain[2 * j + 1].a21.as_vector();
            report.add("a21 recursion: a_" + std::to_string(2 * j + 1) + "^21 = -L+ a_" + std::to_string(2 * j) + "^21",
                       MatDiffPoly::column(next - plus));
        } else {
            // -L+ a_{2n}^21 = i (L+L-)^n u; closing: equals -i m u on solutions, i.e. i E.
            report.add("closing: -L+ a_2n^21 + i m u = i (hierarchy equation)",
                       MatDiffPoly::column(plus + I * shift_times_u(k)) - I * E);
        }
    }

    // Full matrix identity, coefficient of lambda^{2n+1-m}, m = 0..2n+1.
    const BMatrix B = BMatrix::build(k);
    const MatDiffPoly hat = chain.hat_matrix();
    for (std::size_t m = 0; m <= top + 1; ++m) {
        MatDiffPoly res = detail::commutator(chain.matrix(m), B.b1);
        if (m >= 1) {
            res += detail::commutator(chain.matrix(m - 1), B.b0);
            res += total_derivative(chain.matrix(m - 1));
        }
        if (m == top) res += detail::commutator(hat, B.b1);
        if (m == top + 1) {
            res += detail::commutator(hat, B.b0);
            res -= B.b1;
            res += total_derivative(hat);
            // the 21 and 12 blocks equal -E and -E^T on the nose
            for (std::size_t c = 0; c < k; ++c) {
                res(c + 1, 0) += E(c, 0);
                res(0, c + 1) += E(c, 0);
            }
        }
        std::string power = std::to_string(static_cast<long>(top + 1) - static_cast<long>(m));
        report.add("zero curvature, lambda^" + power + (m == top + 1 ? " mod hierarchy" : ""), res);
    }
    return report;
}

/// Convolution identities for the diagonal blocks, l = 1..2n:
///   a_l^11 = -i sum_{j=1}^{l-1} (a_j^11 a_{l-j}^11 + a_j^12 a_{l-j}^21)
///   a_l^22 =  i sum_{j=1}^{l-1} (a_j^22 a_{l-j}^22 + a_j^21 a_{l-j}^12)
inline IdentityReport verify_diagonal_blocks(const LenardChain& chain) {
    const std::size_t k = chain.k;
    const std::size_t top = 2 * static_cast<std::size_t>(chain.n);
    const GaussRational I = GaussRational::i();
    IdentityReport report;
    for (std::size_t l = 1; l <= top; ++l) {
        DiffPoly s11;
        MatDiffPoly s22(k);
        for (std::size_t j = 1; j < l; ++j) {
            s11 += chain[j].a11 * chain[l - j].a11 + (chain[j].a12 * chain[l - j].a21)(0, 0);
            s22 += chain[j].a22 * chain[l - j].a22 + chain[j].a21 * chain[l - j].a12;
        }
        report.add("diagonal block a^11 l=" + std::to_string(l), chain[l].a11 - (-I) * s11);
        report.add("diagonal block a^22 l=" + std::to_string(l), chain[l].a22 - I * s22);
    }
    return report;
}

/// Trace identity -tr a_j^22 = a_j^11 and parity symmetries
/// a_j^21 = (-1)^j (a_j^12)^T, a_j^22 = (-1)^j (a_j^22)^T for j = 1..2n, plus
/// the leading block values.
inline IdentityReport verify_chain_invariants(const LenardChain& chain) {
    const std::size_t k = chain.k;
    const std::size_t top = 2 * static_cast<std::size_t>(chain.n);
    const GaussRational I = GaussRational::i();
    const long kk = static_cast<long>(k);
    IdentityReport report;
    report.add("a0^11 = -ik/(k+1)", chain[0].a11 - DiffPoly(-GaussRational(kk) * I / GaussRational(kk + 1)));
    report.add("a0^22 = i/(k+1) 1_k", chain[0].a22 - (I / GaussRational(kk + 1)) * MatDiffPoly::identity(k));
    report.add("a0^12 = 0", chain[0].a12);
    report.add("a0^21 = 0", chain[0].a21);
    for (std::size_t j = 1; j <= top; ++j) {
        GaussRational sign = j % 2 == 0 ? GaussRational(1) : GaussRational(-1);
        const LaxBlock& b = chain[j];
        report.add("trace j=" + std::to_string(j), b.a11 + b.a22.trace());
        report.add("symmetry a^21 j=" + std::to_string(j), b.a21 - sign * b.a12.transpose());
        report.add("symmetry a^22 j=" + std::to_string(j), b.a22 - sign * b.a22.transpose());
    }
    return report;
}

/// The chain route and the operator route must give the same member.
inline IdentityReport verify_double_construction(const LenardChain& chain, const HierarchyMember& direct) {
    HierarchyMember via_chain = member_from_chain(chain);
    IdentityReport report;
    report.add("chain member lhs = (L+L-)^n u", MatDiffPoly::column(via_chain.lhs - direct.lhs));
    report.add("chain member rhs = -m u", MatDiffPoly::column(via_chain.rhs - direct.rhs));
    return report;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const HierarchyMember& m) {
    nlohmann::json text_lhs = nlohmann::json::array();
    nlohmann::json text_rhs = nlohmann::json::array();
    for (const auto& p : m.lhs) text_lhs.push_back(p.str());
    for (const auto& p : m.rhs) text_rhs.push_back(p.str());
    return {{"n", m.n},          {"k", m.k},         {"lhs", to_json(m.lhs)}, {"rhs", to_json(m.rhs)},
            {"lhs_text", text_lhs}, {"rhs_text", text_rhs}};
}

inline nlohmann::json to_json(const LenardChain& c) {
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t j = 0; j <= 2 * static_cast<std::size_t>(c.n); ++j) {
        const LaxBlock& b = c[j];
        blocks.push_back({{"j", j},
                          {"a11", to_json(b.a11)},
                          {"a12", to_json(b.a12)},
                          {"a21", to_json(b.a21)},
                          {"a22", to_json(b.a22)}});
    }
    nlohmann::json hat = nlohmann::json::array();
    for (const auto& p : c.hat_diagonal) hat.push_back(to_json(p));
    return {{"n", c.n}, {"k", c.k}, {"blocks", blocks}, {"hat_A_2n_diagonal", hat}};
}

namespace detail {

inline std::string latex_generator(const Generator& g) {
    if (g.is_t()) return "t";
    if (g.is_x()) return "x_{" + std::to_string(g.component) + "}";
    if (g.order == 0) return "u_{" + std::to_string(g.component) + "}";
    if (g.order <= 4) {
        static const char* dots[] = {"", "\\dot", "\\ddot", "\\dddot", "\\ddddot"};
        return std::string(dots[g.order]) + "{u}_{" + std::to_string(g.component) + "}";
    }
    return "u_{" + std::to_string(g.component) + "}^{(" + std::to_string(g.order) + ")}";
}

inline std::string latex_rational(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

} // namespace detail

inline std::string to_latex(const DiffPoly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        bool negative = (c.is_real() && sgn(c.re()) < 0) || (c.is_imaginary() && sgn(c.im()) < 0);
        GaussRational mag = negative ? -c : c;
        s += first ? (negative ? "-" : "") : (negative ? " - " : " + ");
        first = false;
        std::string coeff;
        if (mag.is_real())
            coeff = (mag.is_one() && !m.is_one()) ? "" : detail::latex_rational(mag.re());
        else if (mag.is_imaginary())
            coeff = (mag.im() == 1 ? "" : detail::latex_rational(mag.im())) + "\\mathrm{i}";
        else
            coeff = "(" + detail::latex_rational(mag.re()) + (sgn(mag.im()) > 0 ? "+" : "-") +
                    detail::latex_rational(abs(mag.im())) + "\\mathrm{i})";
        s += coeff;
        for (const auto& [g, e] : m.factors()) {
            s += detail::latex_generator(g);
            if (e != 1) s += "^{" + std::to_string(e) + "}";
        }
    }
    return s;
}

inline std::string to_latex(const HierarchyMember& m) {
    std::string s = "\\begin{cases}\n";
    for (std::size_t j = 0; j < m.k; ++j) {
        s += to_latex(m.lhs[j]) + " = " + to_latex(m.rhs[j]);
        s += j + 1 < m.k ? " \\\\\n" : "\n";
    }
    return s + "\\end{cases}";
}

} // namespace hoairy

#endif // HOAIRY_HIERARCHY_HPP
