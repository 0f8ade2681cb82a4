#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "abl/core.hpp"
#include "abl/diffops.hpp"

namespace abl {

/// Soft threshold: sign(x) * max(|x| - mu, 0). A threshold of +inf maps
/// everything to zero.
inline double shrink(double x, double mu) {
    const double m = std::abs(x) - mu;
    return m > 0.0 ? std::copysign(m, x) : 0.0;
}

inline std::vector<double> shrink(std::span<const double> x, double mu) {
    if (mu < 0.0) throw numeric_error("shrink: threshold must be non-negative");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = shrink(x[i], mu);
    return out;
}

inline VecField2D shrink(const VecField2D& w, double mu) {
    if (mu < 0.0) throw numeric_error("shrink: threshold must be non-negative");
    VecField2D out = w;
    for (double& v : out.r.values) v = shrink(v, mu);
    for (double& v : out.y.values) v = shrink(v, mu);
    return out;
}

/// Elementwise clamp to [alpha, beta]; bounds may be infinite.
inline std::vector<double> box_project(std::span<const double> x, double alpha, double beta) {
    if (alpha > beta) throw numeric_error("box_project: lower bound exceeds upper bound");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::min(std::max(x[i], alpha), beta);
    return out;
}

inline Field2D box_project(const Field2D& f, double alpha, double beta) {
    if (alpha > beta) throw numeric_error("box_project: lower bound exceeds upper bound");
    Field2D out = f;
    for (double& v : out.values) v = std::min(std::max(v, alpha), beta);
    return out;
}

// Positive root of tau^2 (tau - 1) = rhs via the closed cubic form
//   C = cbrt((27 rhs + 2 + sqrt((27 rhs + 2)^2 - 4)) / 2),  tau = (C + 1 + 1/C)/3.
// Below rhs = 1e-14 the root is returned as exactly 1 to sidestep
// cancellation in C.
inline double tau_coefficient(double rhs) {
    if (!(rhs > 0.0) || !std::isfinite(rhs))
        throw numeric_error("tau_coefficient: rhs must be positive and finite");
    if (rhs < 1e-14) return 1.0;
    const double s = 27.0 * rhs + 2.0;
    const double disc = 27.0 * rhs * (s + 2.0);  // s^2 - 4 without cancellation
    const double c = std::cbrt(0.5 * (s + std::sqrt(disc)));
    return (c + 1.0 + 1.0 / c) / 3.0;
}

enum class RatioProxBranch { CubicRoot, RandomFallback };

struct RatioProxResult {
    VecField2D h;
    RatioProxBranch branch = RatioProxBranch::CubicRoot;
    double tau = 1.0;  // meaningful on the CubicRoot branch only
};

// Closed-form update of the gradient surrogate in the norm-ratio split:
// minimizes grad_l1 / ||h||_2 + (rho/2) ||h - w||_2^2 over h. For nonzero w
// the solution is tau * w with tau^2 (tau - 1) = grad_l1 / (rho ||w||^3).
// For w = 0 the minimizer is any h with ||h||^3 = grad_l1 / rho; a seeded
// uniform array in [-1, 1) is rescaled onto that sphere.
inline RatioProxResult ratio_prox(const VecField2D& w, double rho, double grad_l1, Rng& rng) {
    if (!(rho > 0.0)) throw numeric_error("ratio_prox: rho must be positive");
    if (grad_l1 < 0.0) throw numeric_error("ratio_prox: gradient l1 norm must be non-negative");

    RatioProxResult res;
    const double w_norm = norm2(w);
    if (w_norm > 0.0) {
        res.branch = RatioProxBranch::CubicRoot;
        const double rhs = grad_l1 / (rho * w_norm * w_norm * w_norm);
        res.tau = rhs < 1e-14 ? 1.0 : tau_coefficient(rhs);
        res.h = w;
        for (double& v : res.h.r.values) v *= res.tau;
        for (double& v : res.h.y.values) v *= res.tau;
        return res;
    }

    res.branch = RatioProxBranch::RandomFallback;
    res.h = VecField2D::zeros_like(w.r);
    if (grad_l1 == 0.0) return res;  // both degenerate: h stays 0

    double n = 0.0;
    while (n == 0.0) {  // all-zero draw has probability ~0
        for (double& v : res.h.r.values) v = uniform_pm1(rng);
        for (double& v : res.h.y.values) v = uniform_pm1(rng);
        n = norm2(res.h);
    }
    const double target = std::cbrt(grad_l1 / rho);
    const double scale = target / n;
    for (double& v : res.h.r.values) v *= scale;
    for (double& v : res.h.y.values) v *= scale;
    return res;
}

}  // namespace abl
