#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "abl/abelop.hpp"
#include "abl/core.hpp"

namespace abl {

// Matrix-free symmetric positive (semi)definite map on flat vectors.
struct LinearMap {
    std::size_t dim = 0;
    std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
};

struct CGResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double rel_residual = 0.0;  // |M x - b| / |b| by recurrence
    bool converged = false;
};

/// Non-preconditioned conjugate gradients for M x = b with warm start x0.
/// Stops when the residual drops below tol * |b|; a warm start that already
/// satisfies the bound returns unchanged after zero iterations. Indefinite
/// curvature or non-finite iterates raise numeric_error.
inline CGResult cg_solve(const LinearMap& M, const std::vector<double>& b, const std::vector<double>& x0,
                         double tol = 1e-7, std::size_t max_iter = 1000,
                         const std::function<void(std::size_t, double)>& on_iterate = {}) {
    if (!M.apply || M.dim == 0) throw numeric_error("cg_solve: map is not callable");
    if (b.size() != M.dim || x0.size() != M.dim) throw shape_error("cg_solve: vector length does not match the map");

    CGResult res;
    res.x = x0;
    const double bnorm = norm2(std::span<const double>(b));
    if (bnorm == 0.0) {
        res.x.assign(M.dim, 0.0);
        res.converged = true;
        return res;
    }

    std::vector<double> r(M.dim), p(M.dim), Mp(M.dim);
    M.apply(res.x, Mp);
    for (std::size_t i = 0; i < M.dim; ++i) r[i] = b[i] - Mp[i];
    double rs = dot(std::span<const double>(r), std::span<const double>(r));
    if (!std::isfinite(rs)) throw numeric_error("cg_solve: non-finite residual");
    res.rel_residual = std::sqrt(rs) / bnorm;
    if (res.rel_residual <= tol) {
        res.converged = true;
        return res;
    }
    p = r;

    for (std::size_t k = 0; k < max_iter; ++k) {
        M.apply(p, Mp);
        const double pMp = dot(std::span<const double>(p), std::span<const double>(Mp));
        if (!std::isfinite(pMp)) throw numeric_error("cg_solve: non-finite curvature");
        if (pMp <= 0.0) throw numeric_error("cg_solve: map is not positive definite along the search direction");
        const double alpha = rs / pMp;
        for (std::size_t i = 0; i < M.dim; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * Mp[i];
        }
        const double rs_next = dot(std::span<const double>(r), std::span<const double>(r));
        if (!std::isfinite(rs_next)) throw numeric_error("cg_solve: non-finite residual");
        res.iterations = k + 1;
        res.rel_residual = std::sqrt(rs_next) / bnorm;
        if (on_iterate) on_iterate(res.iterations, res.rel_residual);
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        const double beta = rs_next / rs;
        rs = rs_next;
        for (std::size_t i = 0; i < M.dim; ++i) p[i] = r[i] + beta * p[i];
    }
    return res;
}

/// Dominant eigenvalue of a symmetric PSD map by power iteration, e.g. the
/// squared spectral norm of A when given x -> A^T A x. Deterministic for a
/// fixed seed; a zero map returns 0.
inline double estimate_opnorm_sq(const LinearMap& M, double tol = 1e-6, std::size_t max_iter = 200,
                                 std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
    if (!M.apply || M.dim == 0) throw numeric_error("estimate_opnorm_sq: map is not callable");
    Rng rng(seed);
    std::vector<double> v(M.dim), Mv(M.dim);
    for (auto& x : v) x = uniform_pm1(rng);
    double vnorm = norm2(std::span<const double>(v));
    if (vnorm == 0.0) v[0] = vnorm = 1.0;
    for (auto& x : v) x /= vnorm;

    double lambda = 0.0;
    for (std::size_t k = 0; k < max_iter; ++k) {
        M.apply(v, Mv);
        const double next = dot(std::span<const double>(v), std::span<const double>(Mv));
        if (!std::isfinite(next)) throw numeric_error("estimate_opnorm_sq: non-finite Rayleigh quotient");
        const double mnorm = norm2(std::span<const double>(Mv));
        if (mnorm == 0.0) return 0.0;
        for (std::size_t i = 0; i < M.dim; ++i) v[i] = Mv[i] / mnorm;
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) return next;
        lambda = next;
    }
    return lambda;
}

/// Squared spectral norm ||A^T A||_2 of a projection operator, matrix-free
/// power iteration on v -> A^T (A v).
inline double estimate_opnorm_sq(const SparseOperator& A, double tol = 1e-6, std::size_t max_iter = 200,
                                 std::uint64_t seed = 0x9e3779b97f4a7c15ull, int threads = 1) {
    LinearMap M{A.n_cols(), [&A, threads](const std::vector<double>& in, std::vector<double>& out) {
                    Field2D u = Field2D::zeros(A.recon);
                    u.values = in;
                    out = A.apply_adjoint(A.apply(u, threads), threads).values;
                }};
    return estimate_opnorm_sq(M, tol, max_iter, seed);
}

}  // namespace abl
