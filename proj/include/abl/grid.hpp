#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "abl/core.hpp"

namespace abl {

// Shape and physical placement of a rectangular grid, without sample values.
// Sampling is cell-centered: cell (i, j) sits at origin + (index + 1/2) * spacing.
struct GridGeom {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing_row = 1.0;  // cm
    double spacing_col = 1.0;  // cm
    double origin_row = 0.0;   // cm, lower edge of row 0
    double origin_col = 0.0;   // cm, lower edge of column 0

    std::size_t size() const { return rows * cols; }

    double row_center(std::size_t i) const { return origin_row + (static_cast<double>(i) + 0.5) * spacing_row; }
    double col_center(std::size_t j) const { return origin_col + (static_cast<double>(j) + 0.5) * spacing_col; }

    // Cell edges; row i spans [row_edge(i), row_edge(i+1)).
    double row_edge(std::size_t i) const { return origin_row + static_cast<double>(i) * spacing_row; }
    double col_edge(std::size_t j) const { return origin_col + static_cast<double>(j) * spacing_col; }

    double row_extent() const { return static_cast<double>(rows) * spacing_row; }
    double col_extent() const { return static_cast<double>(cols) * spacing_col; }

    bool operator==(const GridGeom&) const = default;
};

// A scalar field on a uniform rectangular grid (reconstruction half-plane or
// detector plane). Values are row-major. Treated as an immutable value type
// once filled in; mutation happens by copy-and-write.
struct Field2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing_row = 1.0;
    double spacing_col = 1.0;
    double origin_row = 0.0;
    double origin_col = 0.0;
    std::vector<double> values;

    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    std::size_t size() const { return rows * cols; }

    GridGeom geom() const { return {rows, cols, spacing_row, spacing_col, origin_row, origin_col}; }

    double row_center(std::size_t i) const { return geom().row_center(i); }
    double col_center(std::size_t j) const { return geom().col_center(j); }

    bool same_shape(const Field2D& other) const { return rows == other.rows && cols == other.cols; }
    bool same_grid(const Field2D& other) const { return geom() == other.geom(); }

    static Field2D zeros(const GridGeom& g) {
        Field2D f;
        f.rows = g.rows;
        f.cols = g.cols;
        f.spacing_row = g.spacing_row;
        f.spacing_col = g.spacing_col;
        f.origin_row = g.origin_row;
        f.origin_col = g.origin_col;
        f.values.assign(g.size(), 0.0);
        return f;
    }
};

/// Zero-initialized field; throws on degenerate dimensions or spacings.
inline Field2D make_field(std::size_t rows, std::size_t cols, double spacing_row, double spacing_col,
                          double origin_row = 0.0, double origin_col = 0.0) {
    if (rows == 0 || cols == 0) throw shape_error("make_field: grid dimensions must be >= 1");
    if (!(spacing_row > 0.0) || !(spacing_col > 0.0))
        throw geometry_error("make_field: grid spacings must be positive");
    return Field2D::zeros({rows, cols, spacing_row, spacing_col, origin_row, origin_col});
}

inline double dot(const Field2D& a, const Field2D& b) { return dot(std::span(a.values), std::span(b.values)); }
inline double norm2(const Field2D& f) { return norm2(std::span(f.values)); }
inline double norm1(const Field2D& f) { return norm1(std::span(f.values)); }

inline double max_abs(const Field2D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

enum class BeamMode { ParallelBeam, ConeBeam };

// Source/detector placement. Distances are stored as positive magnitudes:
// the source sits at z = -z_source, the detector plane at z = +z_detector,
// and the object is centered on the origin.
struct ImagingGeometry {
    double z_source = 1.0;    // |z_S|, cm, distance source -> object center
    double z_detector = 1.0;  // |z_D|, cm, distance object center -> detector
    double detector_pitch = 1.0;  // Δx, cm
    BeamMode mode = BeamMode::ParallelBeam;
};

/// Apparent magnification ξ = (|z_D| + |z_S|)/|z_S| in cone-beam mode, 1 otherwise.
inline double magnification(const ImagingGeometry& g) {
    if (!(g.z_source > 0.0)) throw geometry_error("magnification: source distance must be positive");
    if (g.z_detector < 0.0) throw geometry_error("magnification: detector distance must be non-negative");
    if (g.mode == BeamMode::ParallelBeam) return 1.0;
    return (g.z_detector + g.z_source) / g.z_source;
}

/// Reconstruction pitch Δr = Δx / ξ.
inline double recon_pitch(const ImagingGeometry& g) {
    if (!(g.detector_pitch > 0.0)) throw geometry_error("recon_pitch: detector pitch must be positive");
    return g.detector_pitch / magnification(g);
}

/// FNV-1a over the geometry and both grid layouts; keys the operator cache.
inline std::uint64_t geometry_hash(const ImagingGeometry& g, const GridGeom& recon, const GridGeom& det) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    auto mix_d = [&](double v) { mix(&v, sizeof v); };
    auto mix_u = [&](std::uint64_t v) { mix(&v, sizeof v); };
    mix_u(static_cast<std::uint64_t>(g.mode));
    mix_d(g.z_source);
    mix_d(g.z_detector);
    mix_d(g.detector_pitch);
    for (const GridGeom* gg : {&recon, &det}) {
        mix_u(gg->rows);
        mix_u(gg->cols);
        mix_d(gg->spacing_row);
        mix_d(gg->spacing_col);
        mix_d(gg->origin_row);
        mix_d(gg->origin_col);
    }
    return h;
}

}  // namespace abl
