#include <gtest/gtest.h>

#include <hoairy/fredholm.hpp>

#include "support.hpp"

using namespace hoairy;

namespace {

IntervalSystem sys(std::vector<double> x, std::vector<double> a, double t = 0.0) { return {std::move(x), std::move(a), t}; }

} // namespace

TEST(Kernel, ClassicalClosedForm) {
    for (double x = -3.0; x <= 2.0; x += 1.25)
        for (double y = -3.0; y <= 2.0; y += 1.25)
            EXPECT_NEAR(kernel_eval(1, x, y), oracle::airy_kernel_cd(x, y), 1e-8) << x << " " << y;
    EXPECT_NEAR(kernel_eval(1, 0.0, 0.0), 0.066987483779664, 1e-12);
}

TEST(Kernel, Symmetric) {
    for (int n = 1; n <= 2; ++n) {
        EXPECT_EQ(kernel_eval(n, -1.3, 0.7), kernel_eval(n, 0.7, -1.3));
        EXPECT_NEAR(kernel_eval_doublecontour(n, -1.3, 0.7), kernel_eval_doublecontour(n, 0.7, -1.3), 1e-9);
    }
}

TEST(Kernel, DoubleContourAgrees) {
    for (int n = 1; n <= 2; ++n)
        for (double x = -3.0; x <= 2.0; x += 1.25)
            for (double y = -3.0; y <= 2.0; y += 1.25) {
                DoubleContourValue v = kernel_eval_doublecontour_full(n, x, y);
                EXPECT_LE(std::abs(v.imag_residual), 1e-9);
                EXPECT_NEAR(v.value, kernel_eval(n, x, y), 1e-7) << n << " " << x << " " << y;
            }
}

TEST(Nystrom, ZeroWeightsGiveIdentity) {
    IntervalSystem s = sys({1.0, -1.0}, {0.0, 0.0});
    NystromSystem ns = build_nystrom(s, 1);
    EXPECT_TRUE(ns.matrix.isIdentity(0.0));
    EXPECT_EQ(gen_fn(s, 1), 1.0);
    EXPECT_EQ(gen_fn(s, 2), 1.0);
    EXPECT_EQ(log_gen_fn_d2t(s, 1).value, 0.0);
}

TEST(Nystrom, MatrixSymmetricWithPositiveWeights) {
    NystromSystem ns = build_nystrom(sys({0.5, -1.0}, {0.7, 0.2}), 2);
    EXPECT_TRUE(ns.matrix.isApprox(ns.matrix.transpose(), 0.0));
    for (double w : ns.weights) EXPECT_GT(w, 0.0);
    for (std::size_t p = 1; p < ns.nodes.size(); ++p) EXPECT_NE(ns.nodes[p], ns.nodes[p - 1]);
}

TEST(Nystrom, FarRightThresholdGivesOne) {
    EXPECT_NEAR(gen_fn(sys({12.0}, {1.0}), 1), 1.0, 1e-6);
}

TEST(Nystrom, TracyWidomSelfConvergence) {
    IntervalSystem s = sys({-2.0}, {1.0});
    const double F = gen_fn(s, 1);
    NystromOptions hi;
    hi.nodes_per_interval = 80;
    hi.z_nodes = 320;
    hi.truncation = Truncation::Hard;
    hi.hard_cutoff = 28.0;
    EXPECT_NEAR(F, gen_fn(s, 1, hi), 1e-8);
    EXPECT_NEAR(F, 0.413224142505123, 1e-9);
    EXPECT_NEAR(gen_fn(sys({0.0}, {1.0}), 1), 0.969372828355263, 1e-9);
}

TEST(Nystrom, NodeDoubling) {
    const std::vector<IntervalSystem> cases = {sys({1.0, -1.0}, {0.3, 0.7}), sys({0.0, -2.0}, {0.8, 0.4}),
                                               sys({-1.0}, {0.5})};
    for (const auto& s : cases) {
        EXPECT_LT(gen_fn_report(s, 1).error_estimate, 1e-8);
        EXPECT_LT(gen_fn_report(s, 2).error_estimate, 1e-6);
    }
}

TEST(Nystrom, HardTruncationAgrees) {
    NystromOptions hard;
    hard.truncation = Truncation::Hard;
    for (int n = 1; n <= 2; ++n) {
        IntervalSystem s = sys({1.0, -1.0}, {0.6, 0.3});
        EXPECT_NEAR(gen_fn(s, n, hard), gen_fn(s, n), 1e-8) << n;
    }
}

TEST(Nystrom, MergedIntervals) {
    for (int n = 1; n <= 2; ++n)
        for (double a : {0.4, 1.0})
            EXPECT_NEAR(gen_fn(sys({1.0, -1.5}, {a, a}), n), gen_fn(sys({-1.5}, {a}), n), 1e-9) << n << " " << a;
}

TEST(Nystrom, MonotoneInEachWeight) {
    for (int n = 1; n <= 2; ++n)
        for (std::size_t j = 0; j < 2; ++j) {
            double prev = 2.0;
            for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                IntervalSystem s = sys({0.5, -1.0}, {0.5, 0.5});
                s.weights[j] = a;
                const double F = gen_fn(s, n);
                EXPECT_GT(F, 0.0);
                EXPECT_LE(F, 1.0);
                EXPECT_LE(F, prev) << n << " " << j << " " << a;
                prev = F;
            }
        }
}

TEST(Nystrom, EigenvaluesInUnitInterval) {
    for (int n = 1; n <= 2; ++n) {
        Eigen::VectorXd ev = nystrom_operator_eigenvalues(build_nystrom(sys({0.0, -3.0}, {1.0, 1.0}), n));
        EXPECT_GE(ev.minCoeff(), -1e-8) << n;
        EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-8) << n;
        EXPECT_LT(ev.maxCoeff(), 1.0) << n;
    }
}

TEST(Nystrom, ShiftMovesThresholds) {
    EXPECT_NEAR(gen_fn(sys({-1.0, -2.0}, {0.6, 0.3}, 0.75), 1), gen_fn(sys({-0.25, -1.25}, {0.6, 0.3}), 1), 1e-12);
}

TEST(Nystrom, CacheReusesKernel) {
    KernelCache::global().clear();
    IntervalSystem s = sys({0.3}, {0.2});
    gen_fn(s, 1);
    const std::size_t before = KernelCache::global().hits();
    s.weights[0] = 0.9;
    gen_fn(s, 1);
    EXPECT_EQ(KernelCache::global().hits(), before + 1);
}

TEST(Nystrom, InvalidSystems) {
    EXPECT_THROW(gen_fn(sys({-1.0, 1.0}, {0.5, 0.5}), 1), Error);
    EXPECT_THROW(gen_fn(sys({1.0}, {1.5}), 1), Error);
    EXPECT_THROW(gen_fn(sys({1.0, 0.0}, {0.5}), 1), Error);
    EXPECT_THROW(gen_fn(sys({}, {}), 1), Error);
}

TEST(LogDerivative, HastingsMcLeod) {
    // d^2/dt^2 log F_TW(t) = -u(t)^2, u from an independent boundary-value solve
    for (double t : {0.0, 2.0, 4.0}) {
        DerivativeEstimate d = log_gen_fn_d2t(sys({0.0}, {1.0}, t), 1);
        const double u = oracle::hastings_mcleod(t);
        EXPECT_NEAR(d.value, -u * u, 1e-5) << t;
        EXPECT_LT(d.error_estimate, 1e-5);
    }
}

TEST(LogDerivative, FourthOrderStencil) {
    IntervalSystem s = sys({-1.0}, {1.0});
    const double d1 = log_gen_fn_d2t(s, 1, 0.1).value;
    const double d2 = log_gen_fn_d2t(s, 1, 0.05).value;
    const double d3 = log_gen_fn_d2t(s, 1, 0.025).value;
    // error ratio close to 2^4
    EXPECT_NEAR((d1 - d2) / (d2 - d3), 16.0, 2.0);
}

TEST(FiniteDifference, Weights) {
    std::vector<double> xs = {1.0, 0.9, 0.8, 0.7, 0.6};
    std::vector<double> w = fd_weights(1.0, xs, 2);
    // exact for cubics
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += w[i] * std::pow(xs[i], 3);
    EXPECT_NEAR(acc, 6.0, 1e-9);
}

TEST(JointProb, LargestParticle) {
    IntervalSystem s = sys({-1.0}, {1.0});
    JointProbResult r = joint_prob(s, 1, {1});
    EXPECT_EQ(r.terms, 1);
    EXPECT_NEAR(r.value, gen_fn(s, 1), 1e-14);
}

TEST(JointProb, SecondParticleAgainstPolynomialOracle) {
    IntervalSystem s = sys({-1.0}, {1.0});
    // F(alpha) sampled on [0, 1] and fitted by a polynomial: P(zeta_2 < x) = F(1) - F'(1)
    std::vector<double> as, fs;
    for (int i = 0; i <= 16; ++i) {
        const double a = 0.5 * (1.0 - std::cos(std::numbers::pi * i / 16.0));
        as.push_back(a);
        s.weights[0] = a;
        fs.push_back(gen_fn(s, 1));
    }
    const double F1 = oracle::polyfit_derivative(as, fs, 12, 1.0, 0);
    const double dF1 = oracle::polyfit_derivative(as, fs, 12, 1.0, 1);
    s.weights[0] = 1.0;
    JointProbResult r = joint_prob(s, 1, {2});
    EXPECT_EQ(r.terms, 2);
    EXPECT_NEAR(r.value, F1 - dF1, 1e-3);
    EXPECT_LT(r.error_estimate, 1e-3);
    EXPECT_GE(r.value, gen_fn(s, 1));
    EXPECT_LE(r.value, 1.0 + 1e-3);
}

TEST(JointProb, TwoThresholds) {
    IntervalSystem s = sys({0.0, -2.0}, {1.0, 1.0});
    JointProbResult r = joint_prob(s, 1, {1, 2});
    EXPECT_EQ(r.terms, 2);
    EXPECT_GE(r.value, -1e-3);
    EXPECT_LE(r.value, 1.0 + 1e-3);
    // P(zeta_1 < 0, zeta_2 < -2) <= P(zeta_2 < -2) and <= P(zeta_1 < 0)
    EXPECT_LE(r.value, joint_prob(sys({-2.0}, {1.0}), 1, {2}).value + 1e-3);
    EXPECT_LE(r.value, gen_fn(sys({0.0}, {1.0}), 1) + 1e-3);
    EXPECT_THROW(joint_prob(s, 1, {2, 1}), Error);
    EXPECT_THROW(joint_prob(s, 1, {1}), Error);
}
