#pragma once

#include "abl/grid.hpp"

namespace abl {

// Discrete gradient of a field: component along r (columns) and along y
// (rows). Shapes always match the source field.
struct VecField2D {
    Field2D r;
    Field2D y;

    bool same_shape(const VecField2D& g) const { return r.same_shape(g.r) && y.same_shape(g.y); }

    static VecField2D zeros_like(const Field2D& f) {
        VecField2D g;
        g.r = Field2D::zeros(f.geom());
        g.y = Field2D::zeros(f.geom());
        return g;
    }
};

inline double dot(const VecField2D& a, const VecField2D& b) { return dot(a.r, b.r) + dot(a.y, b.y); }
inline double norm2(const VecField2D& g) { return std::sqrt(dot(g, g)); }
inline double norm1(const VecField2D& g) { return norm1(g.r) + norm1(g.y); }

// Forward differences in raw index units (no 1/Δ factor; the solver
// parameter scalings absorb the grid spacing). Reflecting boundaries make
// the trailing difference zero along each axis.
inline VecField2D grad(const Field2D& f) {
    VecField2D g = VecField2D::zeros_like(f);
    const std::size_t nr = f.rows, nc = f.cols;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j + 1 < nc; ++j) g.r(i, j) = f(i, j + 1) - f(i, j);
        // g.r(i, nc-1) stays 0
    }
    for (std::size_t i = 0; i + 1 < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) g.y(i, j) = f(i + 1, j) - f(i, j);
    return g;
}

// Exact adjoint of grad under the unweighted inner product:
// <grad f, g> == <f, grad_transpose g> to round-off.
inline Field2D grad_transpose(const VecField2D& g) {
    if (!g.r.same_shape(g.y)) throw shape_error("grad_transpose: component shapes differ");
    const std::size_t nr = g.r.rows, nc = g.r.cols;
    Field2D out = Field2D::zeros(g.r.geom());
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            double v = 0.0;
            if (j > 0) v += g.r(i, j - 1);
            if (j + 1 < nc) v -= g.r(i, j);
            if (i > 0) v += g.y(i - 1, j);
            if (i + 1 < nr) v -= g.y(i, j);
            out(i, j) = v;
        }
    }
    return out;
}

/// Discrete Laplacian, defined as the composition -grad_transpose(grad(f)).
inline Field2D laplacian(const Field2D& f) {
    Field2D out = grad_transpose(grad(f));
    for (double& v : out.values) v = -v;
    return out;
}

/// Anisotropic TV norm: ||∂_r f||_1 + ||∂_y f||_1.
inline double tv_norm(const Field2D& f) { return norm1(grad(f)); }

}  // namespace abl
