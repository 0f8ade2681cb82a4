#include "abl/prox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

TEST(Shrink, ScalarCases) {
    EXPECT_DOUBLE_EQ(abl::shrink(3.0, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(abl::shrink(-3.0, 1.0), -2.0);
    EXPECT_DOUBLE_EQ(abl::shrink(0.5, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(abl::shrink(-0.5, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(abl::shrink(2.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(abl::shrink(2.0, std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Shrink, SpanAndFieldForms) {
    const std::vector<double> x{-2.0, -0.3, 0.0, 0.3, 2.0};
    const std::vector<double> out = abl::shrink(std::span<const double>(x), 0.5);
    const std::vector<double> want{-1.5, 0.0, 0.0, 0.0, 1.5};
    ASSERT_EQ(out.size(), want.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_DOUBLE_EQ(out[i], want[i]);
    EXPECT_THROW(abl::shrink(std::span<const double>(x), -1.0), abl::numeric_error);

    abl::Field2D f = abl::make_field(1, 2, 1.0, 1.0);
    abl::VecField2D g = abl::VecField2D::zeros_like(f);
    g.r.values = {1.5, -0.2};
    g.y.values = {-4.0, 0.1};
    const abl::VecField2D s = abl::shrink(g, 1.0);
    EXPECT_DOUBLE_EQ(s.r.values[0], 0.5);
    EXPECT_DOUBLE_EQ(s.r.values[1], 0.0);
    EXPECT_DOUBLE_EQ(s.y.values[0], -3.0);
    EXPECT_DOUBLE_EQ(s.y.values[1], 0.0);
}

TEST(BoxProject, ClampsAndValidates) {
    const std::vector<double> x{-1.0, 0.25, 3.0};
    const std::vector<double> out = abl::box_project(std::span<const double>(x), 0.0, 1.0);
    EXPECT_DOUBLE_EQ(out[0], 0.0);
    EXPECT_DOUBLE_EQ(out[1], 0.25);
    EXPECT_DOUBLE_EQ(out[2], 1.0);
    EXPECT_THROW(abl::box_project(std::span<const double>(x), 1.0, 0.0), abl::numeric_error);

    abl::Field2D f = abl::make_field(1, 3, 1.0, 1.0);
    f.values = x;
    const abl::Field2D c = abl::box_project(f, 0.0, std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(c.values[0], 0.0);
    EXPECT_DOUBLE_EQ(c.values[2], 3.0);
}

// Root of tau^2 (tau - 1) = rhs on [1, 1 + rhs], found to machine precision.
double tau_by_bisection(double rhs) {
    double lo = 1.0, hi = 1.0 + rhs;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * mid * (mid - 1.0) < rhs ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TEST(TauCoefficient, MatchesBisectionOracle) {
    for (int i = 0; i <= 200; ++i) {
        const double rhs = std::pow(10.0, -6.0 + 9.0 * i / 200.0);
        const double tau = abl::tau_coefficient(rhs);
        EXPECT_GE(tau, 1.0);
        EXPECT_NEAR(tau, tau_by_bisection(rhs), 1e-10 * tau_by_bisection(rhs)) << "rhs=" << rhs;
        EXPECT_LE(std::abs(tau * tau * (tau - 1.0) - rhs), 1e-10 * std::max(1.0, rhs)) << "rhs=" << rhs;
    }
}

TEST(TauCoefficient, EdgeCases) {
    EXPECT_DOUBLE_EQ(abl::tau_coefficient(1e-15), 1.0);
    EXPECT_THROW(abl::tau_coefficient(0.0), abl::numeric_error);
    EXPECT_THROW(abl::tau_coefficient(-1.0), abl::numeric_error);
    EXPECT_THROW(abl::tau_coefficient(std::numeric_limits<double>::quiet_NaN()), abl::numeric_error);
    EXPECT_THROW(abl::tau_coefficient(std::numeric_limits<double>::infinity()), abl::numeric_error);
}

TEST(RatioProx, CubicBranchScalesInput) {
    abl::Field2D f = abl::make_field(2, 2, 1.0, 1.0);
    abl::VecField2D w = abl::VecField2D::zeros_like(f);
    w.r.values = {1.0, -2.0, 0.5, 0.0};
    w.y.values = {0.25, 0.0, -1.5, 3.0};
    const double rho = 0.7, grad_l1 = 4.2;
    abl::Rng rng(99);
    const abl::RatioProxResult res = abl::ratio_prox(w, rho, grad_l1, rng);
    EXPECT_EQ(res.branch, abl::RatioProxBranch::CubicRoot);

    const double wn = abl::norm2(w);
    const double rhs = grad_l1 / (rho * wn * wn * wn);
    EXPECT_NEAR(res.tau, abl::tau_coefficient(rhs), 1e-15);
    for (std::size_t i = 0; i < w.r.values.size(); ++i) {
        EXPECT_DOUBLE_EQ(res.h.r.values[i], res.tau * w.r.values[i]);
        EXPECT_DOUBLE_EQ(res.h.y.values[i], res.tau * w.y.values[i]);
    }
    // stationarity: tau^2(tau-1) = rhs is equivalent to rho ||h||^2 (||h|| - ||w||) = grad_l1
    const double hn = abl::norm2(res.h);
    EXPECT_NEAR(rho * hn * hn * (hn - wn), grad_l1, 1e-10 * grad_l1);
}

TEST(RatioProx, FallbackHitsTargetNorm) {
    abl::Field2D f = abl::make_field(3, 4, 1.0, 1.0);
    const abl::VecField2D w = abl::VecField2D::zeros_like(f);  // all zero
    const double rho = 5e-3, grad_l1 = 2.5;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        abl::Rng rng(seed);
        const abl::RatioProxResult res = abl::ratio_prox(w, rho, grad_l1, rng);
        EXPECT_EQ(res.branch, abl::RatioProxBranch::RandomFallback);
        const double hn = abl::norm2(res.h);
        EXPECT_LE(std::abs(hn * hn * hn - grad_l1 / rho), 1e-10 * (grad_l1 / rho));
    }
    // same seed, same draw
    abl::Rng a(17), b(17);
    const abl::RatioProxResult ra = abl::ratio_prox(w, rho, grad_l1, a);
    const abl::RatioProxResult rb = abl::ratio_prox(w, rho, grad_l1, b);
    for (std::size_t i = 0; i < ra.h.r.values.size(); ++i) {
        EXPECT_EQ(ra.h.r.values[i], rb.h.r.values[i]);
        EXPECT_EQ(ra.h.y.values[i], rb.h.y.values[i]);
    }
}

TEST(RatioProx, BothDegenerateGivesZero) {
    abl::Field2D f = abl::make_field(2, 3, 1.0, 1.0);
    const abl::VecField2D w = abl::VecField2D::zeros_like(f);
    abl::Rng rng(1);
    const abl::RatioProxResult res = abl::ratio_prox(w, 1.0, 0.0, rng);
    EXPECT_EQ(res.branch, abl::RatioProxBranch::RandomFallback);
    EXPECT_EQ(abl::norm2(res.h), 0.0);
}

TEST(RatioProx, RejectsBadArguments) {
    abl::Field2D f = abl::make_field(2, 2, 1.0, 1.0);
    const abl::VecField2D w = abl::VecField2D::zeros_like(f);
    abl::Rng rng(1);
    EXPECT_THROW(abl::ratio_prox(w, 0.0, 1.0, rng), abl::numeric_error);
    EXPECT_THROW(abl::ratio_prox(w, 1.0, -1.0, rng), abl::numeric_error);
}

}  // namespace
