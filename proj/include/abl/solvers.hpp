#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "abl/abelop.hpp"
#include "abl/core.hpp"
#include "abl/diffops.hpp"
#include "abl/grid.hpp"
#include "abl/krylov.hpp"
#include "abl/prox.hpp"

namespace abl {

// Parameters shared by both reconstruction drivers. Empty optionals engage
// the automatic scalings: lambda = 0.99 / ||A^T A||, and rho1/rho2 scaled by
// the squared radial pitch (5e-3 dr^2 for the ratio solver; 1e-2 dr^2 and 1
// for the TV solver).
struct SolverParams {
    std::optional<double> lambda;
    std::optional<double> rho1;
    std::optional<double> rho2;
    double rho3 = 1.0;  // ratio solver only
    double eps = 1e-7;
    std::size_t k_max = 30;  // outer cap (ratio solver)
    std::size_t j_max = 5;   // inner cap; the TV solver's single loop uses tv_j_max
    std::size_t tv_j_max = 150;
    double alpha = 0.0;
    double beta = std::numeric_limits<double>::infinity();
    double cg_tol = 1e-7;
    std::size_t cg_max_iter = 1000;
    std::uint64_t seed = 0;
    double opnorm_tol = 1e-6;
    std::size_t opnorm_max_iter = 200;
    int threads = 1;

    void validate() const {
        if (!(eps > 0.0)) throw numeric_error("solver: eps must be positive");
        if (k_max < 1 || j_max < 1 || tv_j_max < 1) throw numeric_error("solver: iteration caps must be >= 1");
        if (!(alpha <= beta)) throw numeric_error("solver: box bounds must satisfy alpha <= beta");
        if (lambda && !(*lambda > 0.0)) throw numeric_error("solver: lambda must be positive");
        if (rho1 && !(*rho1 > 0.0)) throw numeric_error("solver: rho1 must be positive");
        if (rho2 && !(*rho2 > 0.0)) throw numeric_error("solver: rho2 must be positive");
        if (!(rho3 > 0.0)) throw numeric_error("solver: rho3 must be positive");
        if (!(cg_tol > 0.0) || cg_max_iter < 1) throw numeric_error("solver: bad CG parameters");
    }
};

struct ReconResult {
    Field2D u;      // returned iterate: the final box projection v
    Field2D u_raw;  // final CG iterate before projection
    std::size_t outer_iters = 0;
    std::size_t total_inner_iters = 0;
    std::size_t total_cg_iters = 0;
    // Index k entries; slot 0 is the zero initial point with rel_change = inf.
    std::vector<double> objective_history;
    std::vector<double> residual_history;  // ||A u - d||_2
    std::vector<double> h_norm_history;
    std::vector<double> rel_change_history;
    double h_norm_min = std::numeric_limits<double>::infinity();  // over updated h only
    bool converged = false;
    std::uint64_t seed = 0;
    double lambda_used = 0.0, rho1_used = 0.0, rho2_used = 0.0, rho3_used = 0.0;
};

struct Objective {
    double value = 0.0;
    double ratio_term = 0.0;  // ||grad u||_1 / ||grad u||_2, 0 when degenerate
    double data_term = 0.0;   // (lambda/2) ||A u - d||_2^2
    bool degenerate = false;  // grad u = 0, the ratio is undefined
};

/// Value of the ratio-regularized objective
/// ||grad u||_1 / ||grad u||_2 + (lambda/2) ||A u - d||_2^2.
inline Objective objective_l1l2(const Field2D& u, const SparseOperator& A, const Field2D& d, double lambda,
                                int threads = 1) {
    if (d.rows != A.detector.rows || d.cols != A.detector.cols)
        throw shape_error("objective: data shape does not match the operator");
    Objective obj;
    const Field2D Au = A.apply(u, threads);
    double rs = 0.0;
    for (std::size_t i = 0; i < Au.values.size(); ++i) {
        const double e = Au.values[i] - d.values[i];
        rs += e * e;
    }
    obj.data_term = 0.5 * lambda * rs;
    const VecField2D g = grad(u);
    const double g2 = norm2(g);
    if (g2 == 0.0) {
        obj.degenerate = true;
        obj.ratio_term = 0.0;
    } else {
        obj.ratio_term = norm1(g) / g2;
    }
    obj.value = obj.ratio_term + obj.data_term;
    return obj;
}

namespace detail {

inline double rel_change(const std::vector<double>& now, const std::vector<double>& prev) {
    double diff = 0.0, base = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
        const double e = now[i] - prev[i];
        diff += e * e;
        base += now[i] * now[i];
    }
    if (base == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / base);
}

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline VecField2D vf_sub(const VecField2D& a, const VecField2D& b) {
    VecField2D out = a;
    for (std::size_t i = 0; i < out.r.values.size(); ++i) out.r.values[i] -= b.r.values[i];
    for (std::size_t i = 0; i < out.y.values.size(); ++i) out.y.values[i] -= b.y.values[i];
    return out;
}

inline VecField2D vf_add(const VecField2D& a, const VecField2D& b) {
    VecField2D out = a;
    for (std::size_t i = 0; i < out.r.values.size(); ++i) out.r.values[i] += b.r.values[i];
    for (std::size_t i = 0; i < out.y.values.size(); ++i) out.y.values[i] += b.y.values[i];
    return out;
}

// y += a - b, accumulated componentwise (multiplier update).
inline void vf_acc_diff(VecField2D& y, const VecField2D& a, const VecField2D& b) {
    for (std::size_t i = 0; i < y.r.values.size(); ++i) y.r.values[i] += a.r.values[i] - b.r.values[i];
    for (std::size_t i = 0; i < y.y.values.size(); ++i) y.y.values[i] += a.y.values[i] - b.y.values[i];
}

inline double resolve_lambda(const SparseOperator& A, const SolverParams& p) {
    if (p.lambda) return *p.lambda;
    const double est = estimate_opnorm_sq(A, p.opnorm_tol, p.opnorm_max_iter, 0x9e3779b97f4a7c15ull, p.threads);
    if (!(est > 0.0)) throw numeric_error("solver: automatic lambda failed, ||A^T A|| estimate is zero");
    return 0.99 / est;
}

inline void check_finite(const Field2D& f, const char* where) {
    if (!all_finite(std::span<const double>(f.values))) throw numeric_error(std::string("solver: non-finite iterate in ") + where);
}

}  // namespace detail

/// Box-constrained ratio-regularized reconstruction:
///   min ||grad u||_1 / ||grad u||_2 + (lambda/2) ||A u - d||_2^2,  alpha <= u <= beta.
///
/// Nested ADMM. The inner loop alternates a CG solve of
///   M u = lambda A^T d + rho1 grad^T(dvec - b1) + rho2 grad^T(h - b2) + rho3 (v - e)
/// with M = lambda A^T A + (rho1 + rho2) grad^T grad + rho3 I, soft
/// thresholding of grad u + b1 at 1/(rho1 ||h||), the box projection, and the
/// multiplier updates. Each outer pass then rescales grad u + b2 onto h
/// (cubic-root prox, with the random-direction fallback when that vector
/// vanishes) and advances b2. Loops stop on relative change <= eps or at the
/// caps; b1 and e persist across outer passes, only the inner counter resets.
inline ReconResult reconstruct_l1l2(const SparseOperator& A, const Field2D& d, const SolverParams& p) {
    p.validate();
    if (d.rows != A.detector.rows || d.cols != A.detector.cols)
        throw shape_error("reconstruct: data shape does not match the operator");

    const double lambda = detail::resolve_lambda(A, p);
    const double dr = A.recon.spacing_col;
    const double rho1 = p.rho1.value_or(5e-3 * dr * dr);
    const double rho2 = p.rho2.value_or(5e-3 * dr * dr);
    const double rho3 = p.rho3;
    const std::size_t n = A.n_cols();
    Rng rng(p.seed);

    ReconResult res;
    res.seed = p.seed;
    res.lambda_used = lambda;
    res.rho1_used = rho1;
    res.rho2_used = rho2;
    res.rho3_used = rho3;

    Field2D u = Field2D::zeros(A.recon);
    Field2D v = u, e = u;
    VecField2D dvec = VecField2D::zeros_like(u);
    VecField2D b1 = dvec, b2 = dvec, h = dvec;

    Field2D atd = A.apply_adjoint(d, p.threads);
    for (auto& x : atd.values) x *= lambda;

    const double rho12 = rho1 + rho2;
    LinearMap M{n, [&](const std::vector<double>& in, std::vector<double>& out) {
                    Field2D uin = Field2D::zeros(A.recon);
                    uin.values = in;
                    Field2D ata = A.apply_adjoint(A.apply(uin, p.threads), p.threads);
                    Field2D gtg = grad_transpose(grad(uin));
                    out.resize(n);
                    for (std::size_t i = 0; i < n; ++i)
                        out[i] = lambda * ata.values[i] + rho12 * gtg.values[i] + rho3 * in[i];
                }};

    auto record = [&](const Field2D& ucur, double h_norm, double rel) {
        const Objective obj = objective_l1l2(ucur, A, d, lambda, p.threads);
        res.objective_history.push_back(obj.value);
        res.residual_history.push_back(std::sqrt(2.0 * obj.data_term / lambda));
        res.h_norm_history.push_back(h_norm);
        res.rel_change_history.push_back(rel);
    };
    record(u, 0.0, std::numeric_limits<double>::infinity());

    double rel_outer = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    while (k < p.k_max && rel_outer > p.eps) {
        const std::vector<double> u_outer_prev = u.values;
        const double h_norm_k = norm2(h);
        const double shrink_thr =
            h_norm_k > 0.0 ? 1.0 / (rho1 * h_norm_k) : std::numeric_limits<double>::infinity();

        double rel_inner = std::numeric_limits<double>::infinity();
        std::size_t j = 0;
        while (j < p.j_max && rel_inner > p.eps) {
            std::vector<double> rhs = atd.values;
            detail::axpy(rhs, rho1, grad_transpose(detail::vf_sub(dvec, b1)).values);
            detail::axpy(rhs, rho2, grad_transpose(detail::vf_sub(h, b2)).values);
            for (std::size_t i = 0; i < n; ++i) rhs[i] += rho3 * (v.values[i] - e.values[i]);

            CGResult cg = cg_solve(M, rhs, u.values, p.cg_tol, p.cg_max_iter);
            res.total_cg_iters += cg.iterations;
            rel_inner = detail::rel_change(cg.x, u.values);
            u.values = std::move(cg.x);
            detail::check_finite(u, "u-update");

            const VecField2D gu = grad(u);
            dvec = shrink(detail::vf_add(gu, b1), shrink_thr);
            for (std::size_t i = 0; i < n; ++i)
                v.values[i] = std::clamp(u.values[i] + e.values[i], p.alpha, p.beta);
            detail::vf_acc_diff(b1, gu, dvec);
            for (std::size_t i = 0; i < n; ++i) e.values[i] += u.values[i] - v.values[i];
            ++j;
        }
        res.total_inner_iters += j;

        const VecField2D gu = grad(u);
        const RatioProxResult hp = ratio_prox(detail::vf_add(gu, b2), rho2, norm1(gu), rng);
        h = hp.h;
        detail::vf_acc_diff(b2, gu, h);
        const double h_norm = norm2(h);
        res.h_norm_min = std::min(res.h_norm_min, h_norm);

        ++k;
        rel_outer = detail::rel_change(u.values, u_outer_prev);
        record(u, h_norm, rel_outer);
    }

    res.outer_iters = k;
    res.converged = rel_outer <= p.eps;
    res.u_raw = u;
    res.u = v;
    return res;
}

/// Box-constrained anisotropic TV reconstruction:
///   min ||grad u||_1 + (lambda/2) ||A u - d||_2^2,  alpha <= u <= beta.
///
/// Single-loop ADMM with M = lambda A^T A + rho1 grad^T grad + rho2 I and the
/// soft threshold at 1/rho1. Histories record the TV objective; h_norm_min
/// tracks the splitting variable norm exactly as in the ratio solver.
inline ReconResult reconstruct_tv(const SparseOperator& A, const Field2D& d, const SolverParams& p) {
    p.validate();
    if (d.rows != A.detector.rows || d.cols != A.detector.cols)
        throw shape_error("reconstruct: data shape does not match the operator");

    const double lambda = detail::resolve_lambda(A, p);
    const double dr = A.recon.spacing_col;
    const double rho1 = p.rho1.value_or(1e-2 * dr * dr);
    const double rho2 = p.rho2.value_or(1.0);
    const std::size_t n = A.n_cols();

    ReconResult res;
    res.seed = p.seed;
    res.lambda_used = lambda;
    res.rho1_used = rho1;
    res.rho2_used = rho2;
    res.rho3_used = 0.0;

    Field2D u = Field2D::zeros(A.recon);
    Field2D v = u, e = u;
    VecField2D h = VecField2D::zeros_like(u);
    VecField2D b = h;

    Field2D atd = A.apply_adjoint(d, p.threads);
    for (auto& x : atd.values) x *= lambda;

    LinearMap M{n, [&](const std::vector<double>& in, std::vector<double>& out) {
                    Field2D uin = Field2D::zeros(A.recon);
                    uin.values = in;
                    Field2D ata = A.apply_adjoint(A.apply(uin, p.threads), p.threads);
                    Field2D gtg = grad_transpose(grad(uin));
                    out.resize(n);
                    for (std::size_t i = 0; i < n; ++i)
                        out[i] = lambda * ata.values[i] + rho1 * gtg.values[i] + rho2 * in[i];
                }};

    auto record = [&](const Field2D& ucur, double h_norm, double rel) {
        const Field2D Au = A.apply(ucur, p.threads);
        double rs = 0.0;
        for (std::size_t i = 0; i < Au.values.size(); ++i) {
            const double err = Au.values[i] - d.values[i];
            rs += err * err;
        }
        res.objective_history.push_back(tv_norm(ucur) + 0.5 * lambda * rs);
        res.residual_history.push_back(std::sqrt(rs));
        res.h_norm_history.push_back(h_norm);
        res.rel_change_history.push_back(rel);
    };
    record(u, 0.0, std::numeric_limits<double>::infinity());

    double rel = std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    while (j < p.tv_j_max && rel > p.eps) {
        std::vector<double> rhs = atd.values;
        detail::axpy(rhs, rho1, grad_transpose(detail::vf_sub(h, b)).values);
        for (std::size_t i = 0; i < n; ++i) rhs[i] += rho2 * (v.values[i] - e.values[i]);

        CGResult cg = cg_solve(M, rhs, u.values, p.cg_tol, p.cg_max_iter);
        res.total_cg_iters += cg.iterations;
        rel = detail::rel_change(cg.x, u.values);
        u.values = std::move(cg.x);
        detail::check_finite(u, "u-update");

        const VecField2D gu = grad(u);
        h = shrink(detail::vf_add(gu, b), 1.0 / rho1);
        detail::vf_acc_diff(b, gu, h);
        for (std::size_t i = 0; i < n; ++i)
            v.values[i] = std::clamp(u.values[i] + e.values[i], p.alpha, p.beta);
        for (std::size_t i = 0; i < n; ++i) e.values[i] += u.values[i] - v.values[i];
        ++j;

        const double h_norm = norm2(h);
        res.h_norm_min = std::min(res.h_norm_min, h_norm);
        record(u, h_norm, rel);
    }

    res.outer_iters = j;
    res.total_inner_iters = j;
    res.converged = rel <= p.eps;
    res.u_raw = u;
    res.u = v;
    return res;
}

}  // namespace abl
