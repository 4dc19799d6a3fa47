// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <hoairy/airy.hpp>
#include <hoairy/fredholm.hpp>
#include <hoairy/hierarchy.hpp>
#include <hoairy/painleve.hpp>

#include "support.hpp"

using namespace hoairy;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

DiffPoly U(int j, int m = 0) { return DiffPoly::u(j, m); }

DiffPoly sum_over(int k, const std::function<DiffPoly(int)>& f) {
    DiffPoly s;
    for (int l = 1; l <= k; ++l) s += f(l);
    return s;
}

// u_j'' solved from the first member: 2 u_j <u,u> + (t + x_j) u_j
DiffPoly n1_solved(int k, int j) {
    return GaussRational(2) * U(j) * sum_over(k, [](int l) { return U(l) * U(l); }) +
           (DiffPoly::t() + DiffPoly::x(j)) * U(j);
}

// D^4 u - 4 u'' u.u - 8 u' u'.u - 6 u u.u'' - 2 u u'.u' + 6 u (u.u)^2
DiffPoly n2_lhs(int k, int j) {
    DiffPoly uu = sum_over(k, [](int l) { return U(l) * U(l); });
    DiffPoly udu = sum_over(k, [](int l) { return U(l, 1) * U(l); });
    DiffPoly uddu = sum_over(k, [](int l) { return U(l) * U(l, 2); });
    DiffPoly dudu = sum_over(k, [](int l) { return U(l, 1) * U(l, 1); });
    return U(j, 4) - GaussRational(4) * U(j, 2) * uu - GaussRational(8) * U(j, 1) * udu -
           GaussRational(6) * U(j) * uddu - GaussRational(2) * U(j) * dudu + GaussRational(6) * U(j) * uu.pow(2);
}

Verdict criterion1() {
    Verdict v;
    int compared = 0;
    for (int k = 1; k <= 4; ++k) {
        HierarchyMember m = hierarchy_member(1, static_cast<std::size_t>(k));
        const VecDiffPoly eq = m.equation();
        for (int j = 1; j <= k; ++j, ++compared)
            if (U(j, 2) + eq[j - 1] != n1_solved(k, j)) {
                v.pass = false;
                v.detail += " n=1 k=" + std::to_string(k) + " j=" + std::to_string(j) + " differs;";
            }
    }
    for (int k = 1; k <= 2; ++k) {
        HierarchyMember m = hierarchy_member(2, static_cast<std::size_t>(k));
        for (int j = 1; j <= k; ++j, ++compared)
            if (m.lhs[j - 1] != n2_lhs(k, j) || m.rhs[j - 1] != -(DiffPoly::t() + DiffPoly::x(j)) * U(j)) {
                v.pass = false;
                v.detail += " n=2 k=" + std::to_string(k) + " j=" + std::to_string(j) + " differs;";
            }
    }
    if (v.pass) v.detail = std::to_string(compared) + " components equal exactly";
    return v;
}

Verdict criterion2() {
    Verdict v;
    std::size_t total = 0;
    for (int n = 1; n <= 3; ++n)
        for (std::size_t k = 1; k <= 3; ++k) {
            LenardChain chain = lax_chain(n, k);
            HierarchyMember member = hierarchy_member(n, k);
            IdentityReport r = verify_compatibility(chain, member);
            r.append(verify_diagonal_blocks(chain));
            r.append(verify_chain_invariants(chain));
            total += r.checks.size();
            if (!r.all_exact()) {
                v.pass = false;
                for (const auto& c : r.checks)
                    if (!c.exact()) v.detail += " (" + std::to_string(n) + "," + std::to_string(k) + ") " + c.name + ";";
            }
        }
    if (v.pass) v.detail = std::to_string(total) + " identities, all residuals zero";
    return v;
}

Verdict criterion3() {
    Verdict v;
    for (int n = 1; n <= 3; ++n)
        for (std::size_t k = 1; k <= 3; ++k) {
            LenardChain chain = lax_chain(n, k);
            HierarchyMember direct = hierarchy_member(n, k);
            if (!(member_from_chain(chain) == direct) || !verify_double_construction(chain, direct).all_exact()) {
                v.pass = false;
                v.detail += " (" + std::to_string(n) + "," + std::to_string(k) + ") differs;";
            }
        }
    if (v.pass) v.detail = "9 (n,k) pairs identical";
    return v;
}

Verdict criterion4() {
    double oracle_err = 0.0, contour_err = 0.0, imag = 0.0;
    for (int i = 0; i <= 240; ++i) {
        const double x = -8.0 + 0.05 * i;
        oracle_err = std::max(oracle_err, std::abs(ai_n(1, x) - oracle::airy_series(1, x)));
    }
    const double pi = std::numbers::pi;
    for (int n = 1; n <= 3; ++n) {
        const double p = 2.0 * n + 1.0;
        ContourSpec alt = ContourSpec::standard(n);
        alt.angle_in = pi - pi / (3.0 * p);
        alt.angle_out = pi / (1.5 * p);
        alt.nodes_per_ray = 320;
        for (int i = 0; i <= 64; ++i) {
            const double x = -8.0 + 0.25 * i;
            AiryValue ref = ai_n_eval(n, x, 0, ContourSpec::standard(n));
            imag = std::max(imag, std::abs(ref.imag_residual));
            contour_err = std::max(contour_err, std::abs(ai_n(n, x, alt) - ref.value));
            contour_err = std::max(contour_err, std::abs(ai_n(n, x, ContourSpec::standard(n).doubled()) - ref.value));
        }
    }
    return {oracle_err <= 1e-10 && contour_err <= 1e-10 && imag <= 1e-12,
            "oracle " + sci(oracle_err) + ", contour " + sci(contour_err) + ", imag " + sci(imag)};
}

Verdict criterion5() {
    double dc = 0.0, cd = 0.0;
    for (int n = 1; n <= 2; ++n)
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) {
                const double x = -3.0 + 1.25 * a, y = -3.0 + 1.25 * b;
                const double K = kernel_eval(n, x, y);
                dc = std::max(dc, std::abs(K - kernel_eval_doublecontour(n, x, y)));
                if (n == 1) cd = std::max(cd, std::abs(K - oracle::airy_kernel_cd(x, y)));
            }
    return {dc <= 1e-7 && cd <= 1e-8, "double contour " + sci(dc) + ", closed form " + sci(cd)};
}

Verdict criterion6() {
    Verdict v;
    auto sys = [](std::vector<double> x, std::vector<double> a) { return IntervalSystem{std::move(x), std::move(a), 0.0}; };
    bool identity = true;
    for (int n = 1; n <= 2; ++n) {
        identity = identity && gen_fn(sys({0.0}, {0.0}), n) == 1.0 && gen_fn(sys({1.0, -1.0}, {0.0, 0.0}), n) == 1.0;
    }
    NystromOptions doubled;
    doubled.nodes_per_interval *= 2;
    doubled.z_nodes *= 2;
    double conv[3] = {0.0, 0.0, 0.0};
    for (const auto& s : {sys({-1.0}, {0.5}), sys({-2.0}, {1.0}), sys({1.0, -1.0}, {0.3, 0.7}), sys({0.0, -2.0}, {0.8, 0.4}),
                          sys({1.0, -1.0}, {0.6, 0.3})})
        for (int n = 1; n <= 2; ++n) conv[n] = std::max(conv[n], std::abs(gen_fn(s, n) - gen_fn(s, n, doubled)));
    double merged = 0.0;
    for (int n = 1; n <= 2; ++n)
        for (double a : {0.4, 1.0})
            merged = std::max(merged, std::abs(gen_fn(sys({1.0, -1.5}, {a, a}), n) - gen_fn(sys({-1.5}, {a}), n)));
    bool monotone = true;
    for (int n = 1; n <= 2; ++n)
        for (std::size_t j = 0; j < 2; ++j) {
            double prev = 2.0;
            for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                IntervalSystem s = sys({0.5, -1.0}, {0.5, 0.5});
                s.weights[j] = a;
                const double F = gen_fn(s, n);
                monotone = monotone && F <= prev && F > 0.0 && F <= 1.0;
                prev = F;
            }
        }
    v.pass = identity && conv[1] < 1e-8 && conv[2] < 1e-6 && merged <= 1e-9 && monotone;
    v.detail = std::string("F(alpha=0)=1 ") + (identity ? "exact" : "FAILED") + ", doubling n=1 " + sci(conv[1]) +
               " n=2 " + sci(conv[2]) + ", merged " + sci(merged) + ", monotone " + (monotone ? "yes" : "no");
    return v;
}

const std::vector<PainleveProblem> route_cases = {
    {1, {0.0}, {1.0}},       {1, {-1.0}, {0.5}},           {1, {1.0, -1.0}, {0.3, 0.7}},
    {1, {0.0, -2.0}, {0.8, 0.4}}, {2, {0.0}, {0.9}}, {2, {1.0, -1.0}, {0.6, 0.3}}};

IntervalSystem as_system(const PainleveProblem& p) { return {p.x, p.alpha, 0.0}; }

std::string label(const PainleveProblem& p) {
    std::ostringstream os;
    os << "n=" << p.n << " x=(";
    for (std::size_t j = 0; j < p.x.size(); ++j) os << (j ? "," : "") << p.x[j];
    os << ") a=(";
    for (std::size_t j = 0; j < p.alpha.size(); ++j) os << (j ? "," : "") << p.alpha[j];
    os << ")";
    return os.str();
}

Verdict criterion7() {
    Verdict v;
    double worst = 0.0;
    for (const auto& p : route_cases) {
        SolutionGrid g = solve(p, 0.0);
        TwIntegral tw = tw_integral(g, p);
        const double diff = std::abs(std::log(gen_fn(as_system(p), p.n)) - tw.log_F);
        worst = std::max(worst, diff);
        if (!(diff <= 1e-4) || g.t_trust > 1e-12) {
            v.pass = false;
            v.detail += " " + label(p) + " diff " + sci(diff) + " trust from " + sci(g.t_trust) + ";";
        }
    }
    v.detail = "max |log F - tw| " + sci(worst) + " over 6 cases" + v.detail;
    return v;
}

Verdict criterion8() {
    Verdict v;
    double worst = 0.0;
    for (const auto& p : route_cases) {
        if (p.n != 1) continue;
        SolutionGrid g = solve(p, 0.0);
        for (double t : {0.0, 1.0, 2.0, 3.0}) {
            IntervalSystem s = as_system(p);
            s.shift = t;
            const std::size_t i = g.index_of(t);
            if (i == static_cast<std::size_t>(-1) || !g.trusted(t)) {
                v.pass = false;
                v.detail += " " + label(p) + " t=" + std::to_string(t) + " not on trust window;";
                continue;
            }
            const double r = std::abs(log_gen_fn_d2t(s, 1).value + g.inner_uu(i));
            worst = std::max(worst, r);
            if (!(r <= 1e-5)) v.pass = false;
        }
    }
    v.detail = "max |d2 log F + <u,u>| " + sci(worst) + v.detail;
    return v;
}

Verdict criterion9() {
    double worst1 = 0.0, worst2 = 0.0;
    for (const PainleveProblem& p : {PainleveProblem{1, {1.0, -1.0}, {0.3, 0.6}}, PainleveProblem{1, {0.0, -1.5}, {0.3, 0.6}},
                                     PainleveProblem{2, {1.0, -1.0}, {0.3, 0.6}}}) {
        SolutionGrid g = solve(p, -1.0);
        double m1 = 0.0, m2 = 0.0, re1 = 0.0, im2 = 0.0;
        for (std::size_t i = 0; i < g.t.size(); ++i) {
            if (!g.trusted(g.t[i])) continue;
            m1 = std::max(m1, std::abs(g.u(i, 0)));
            m2 = std::max(m2, std::abs(g.u(i, 1)));
            re1 = std::max(re1, std::abs(g.u(i, 0).real()));
            im2 = std::max(im2, std::abs(g.u(i, 1).imag()));
        }
        worst1 = std::max(worst1, re1 / m1);
        worst2 = std::max(worst2, im2 / m2);
    }
    return {worst1 <= 1e-6 && worst2 <= 1e-6, "max |Re u1|/max|u1| " + sci(worst1) + ", |Im u2|/max|u2| " + sci(worst2)};
}

Verdict criterion10() {
    Verdict v;
    double ratio_dev = 0.0, shift = 0.0;
    for (const auto& p : route_cases) {
        const CompiledRHS rhs = compile_rhs(hierarchy_member(p.n, p.k()));
        const double T = choose_t_max(p);
        SolutionGrid g = integrate(rhs, p, T, 0.0);
        SolutionGrid h = integrate(rhs, p, T + 1.0, 0.0);
        const std::size_t i = g.index_of(T - 1.0);
        for (std::size_t j = 0; j < p.k(); ++j) {
            const cplx expected = std::sqrt(cplx(p.weight_gap(j))) * ai_n(p.n, T - 1.0 + p.x[j]);
            ratio_dev = std::max(ratio_dev, std::abs(g.u(i, j) / expected - 1.0));
        }
        for (std::size_t a = 0; a < g.t.size(); ++a) {
            if (!g.trusted(g.t[a]) || g.t[a] > T - 1.0) continue;
            const std::size_t b = h.index_of(g.t[a]);
            if (b == static_cast<std::size_t>(-1)) continue;
            for (std::size_t j = 0; j < p.k(); ++j) shift = std::max(shift, std::abs(g.u(a, j) - h.u(b, j)));
        }
        shift = std::max(shift, std::abs(tw_integral(g, p).log_F - tw_integral(h, p).log_F));
    }
    v.pass = ratio_dev <= 1e-4 && shift < 1e-6;
    v.detail = "max |ratio - 1| at t_max-1 " + sci(ratio_dev) + ", t_max+1 shift " + sci(shift);
    return v;
}

Verdict criterion11() {
    constexpr int trials = 1000;
    int leibniz = 0, inverse = 0, euler = 0;
    std::mt19937 rng(20261014);
    for (int trial = 0; trial < trials; ++trial) {
        DiffPoly p = randpoly::random_poly(rng, 3), q = randpoly::random_poly(rng, 3);
        if (total_derivative(p * q) == total_derivative(p) * q + p * total_derivative(q) &&
            total_derivative(p + q) == total_derivative(p) + total_derivative(q))
            ++leibniz;
        if (formal_antiderivative(total_derivative(p)) == p - kernel_part(p)) ++inverse;
        const DiffPoly dp = total_derivative(p);
        bool killed = true;
        for (int j = 1; j <= 3; ++j) killed = killed && euler_operator(dp, j).is_zero();
        if (killed) ++euler;
    }
    return {leibniz == trials && inverse == trials && euler == trials,
            "derivation " + std::to_string(leibniz) + "/1000, left inverse " + std::to_string(inverse) +
                "/1000, Euler kernel " + std::to_string(euler) + "/1000"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"hierarchy members exact", criterion1},      {"Lax pair identities exact", criterion2},
        {"double construction agrees", criterion3},   {"Airy function fidelity", criterion4},
        {"kernel cross-check", criterion5},           {"determinant sanity", criterion6},
        {"Fredholm vs Painleve route", criterion7},   {"second log-derivative identity", criterion8},
        {"reality pattern", criterion9},              {"asymptotic seeding", criterion10},
        {"ring laws, 1000 trials", criterion11}};
    int failed = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        Verdict v;
        try {
            v = criteria[c].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::printf("criterion %zu %s: %s (%s)\n", c + 1, v.pass ? "PASS" : "FAIL", criteria[c].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
