#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "abl/core.hpp"
#include "abl/grid.hpp"

namespace abl {

// Photon path from the source to one detector pixel, parameterized on [0, 1].
struct Ray {
    std::array<double, 3> origin{};  // (x, y, z), cm
    std::array<double, 3> dir{};     // origin + 1.0 * dir = detector pixel
};

/// Ray reaching the detector pixel physically located at (x, y, z_detector).
/// Cone beam: from the point source at (0, 0, -z_source). Parallel beam: the
/// line {x, y} traversed from the source plane to the detector plane.
inline Ray ray_for_pixel(const ImagingGeometry& g, double x, double y) {
    if (!(g.z_source > 0.0) || g.z_detector < 0.0)
        throw geometry_error("ray_for_pixel: invalid source/detector distances");
    const double span = g.z_source + g.z_detector;
    if (g.mode == BeamMode::ConeBeam) return {{0.0, 0.0, -g.z_source}, {x, y, span}};
    return {{x, y, -g.z_source}, {0.0, 0.0, span}};
}

namespace detail {

// Squared distance to the symmetry axis along the ray is the quadratic
// q(t) = a t^2 + b t + c in the (x, z) plane.
struct AxisQuadratic {
    double a, b, c;

    static AxisQuadratic from_ray(const Ray& ray) {
        const double sx = ray.origin[0], sz = ray.origin[2];
        const double dx = ray.dir[0], dz = ray.dir[2];
        return {dx * dx + dz * dz, 2.0 * (sx * dx + sz * dz), sx * sx + sz * sz};
    }

    double at(double t) const { return (a * t + b) * t + c; }

    // Length (in t) of {q(t) <= r^2} intersected with [lo, hi]. Tangent and
    // missing rays (non-positive discriminant) contribute zero length, which
    // also keeps grazing incidence free of NaNs.
    double sublevel_length(double r, double lo, double hi) const {
        if (r <= 0.0 || hi <= lo) return 0.0;
        const double rr = r * r;
        if (a == 0.0) return c <= rr ? hi - lo : 0.0;
        const double disc = b * b - 4.0 * a * (c - rr);
        if (disc <= 0.0) return 0.0;
        const double s = std::sqrt(disc);
        const double t1 = (-b - s) / (2.0 * a);
        const double t2 = (-b + s) / (2.0 * a);
        const double w = std::min(t2, hi) - std::max(t1, lo);
        return w > 0.0 ? w : 0.0;
    }
};

}  // namespace detail

/// Euclidean length of the ray segment inside the annular region
/// {r_in^2 <= x^2 + z^2 <= r_out^2} ∩ {y_lo <= y < y_hi}, restricted to the
/// ray's parameter range. A degenerate shell or empty slab yields 0.
inline double ray_shell_length(const Ray& ray, double r_in, double r_out, double y_lo, double y_hi) {
    if (r_in < 0.0) throw geometry_error("ray_shell_length: negative inner radius");
    if (r_in > r_out) throw geometry_error("ray_shell_length: inner radius exceeds outer radius");
    if (r_in == r_out || y_lo >= y_hi) return 0.0;

    // Clip the parameter range to the y slab.
    double lo = 0.0, hi = 1.0;
    const double sy = ray.origin[1], dy = ray.dir[1];
    if (dy == 0.0) {
        if (!(sy >= y_lo && sy < y_hi)) return 0.0;
    } else {
        double t0 = (y_lo - sy) / dy;
        double t1 = (y_hi - sy) / dy;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
        if (hi <= lo) return 0.0;
    }

    const auto q = detail::AxisQuadratic::from_ray(ray);
    const double len_t = q.sublevel_length(r_out, lo, hi) - q.sublevel_length(r_in, lo, hi);
    const double dlen = std::sqrt(ray.dir[0] * ray.dir[0] + ray.dir[1] * ray.dir[1] + ray.dir[2] * ray.dir[2]);
    return len_t > 0.0 ? len_t * dlen : 0.0;
}

// Discretized single-view projection operator in compressed row layout, one
// row per detector pixel, one column per reconstruction annulus. Immutable
// once assembled; coefficients are chord lengths in cm.
struct SparseOperator {
    GridGeom recon;     // reconstruction half-plane (rows = y, cols = r)
    GridGeom detector;  // detector plane (rows = y, cols = x)
    std::vector<std::uint64_t> row_offsets;  // size n_rows + 1
    std::vector<std::uint32_t> col_indices;
    std::vector<double> coefficients;

    std::size_t n_rows() const { return detector.size(); }
    std::size_t n_cols() const { return recon.size(); }
    std::size_t nnz() const { return coefficients.size(); }

    /// Forward projection d = A u.
    Field2D apply(const Field2D& u, int threads = 1) const {
        if (u.rows != recon.rows || u.cols != recon.cols)
            throw shape_error("apply: field shape does not match the reconstruction grid");
        Field2D d = Field2D::zeros(detector);
        parallel_for(n_rows(), threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t row = lo; row < hi; ++row) {
                double s = 0.0;
                for (std::uint64_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
                    s += coefficients[k] * u.values[col_indices[k]];
                d.values[row] = s;
            }
        });
        return d;
    }

    /// Exact transpose application u = A^T d. With several threads each
    /// worker accumulates into its own buffer; buffers are summed in worker
    /// order so a fixed thread count reproduces bit-identical results.
    Field2D apply_adjoint(const Field2D& d, int threads = 1) const {
        if (d.rows != detector.rows || d.cols != detector.cols)
            throw shape_error("apply_adjoint: field shape does not match the detector grid");
        Field2D u = Field2D::zeros(recon);
        if (threads <= 1) {
            for (std::size_t row = 0; row < n_rows(); ++row) {
                const double v = d.values[row];
                if (v == 0.0) continue;
                for (std::uint64_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
                    u.values[col_indices[k]] += coefficients[k] * v;
            }
            return u;
        }
        const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n_rows());
        const std::size_t chunk = (n_rows() + t - 1) / t;
        std::vector<std::vector<double>> partial(t);
        parallel_for(t, static_cast<int>(t), [&](std::size_t wlo, std::size_t whi) {
            for (std::size_t w = wlo; w < whi; ++w) {
                const std::size_t lo = w * chunk, hi = std::min(n_rows(), lo + chunk);
                auto& buf = partial[w];
                buf.assign(n_cols(), 0.0);
                for (std::size_t row = lo; row < hi; ++row) {
                    const double v = d.values[row];
                    if (v == 0.0) continue;
                    for (std::uint64_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
                        buf[col_indices[k]] += coefficients[k] * v;
                }
            }
        });
        for (const auto& buf : partial)
            for (std::size_t c = 0; c < n_cols(); ++c) u.values[c] += buf[c];
        return u;
    }

    double row_sum(std::size_t row) const {
        double s = 0.0;
        for (std::uint64_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k) s += coefficients[k];
        return s;
    }

    /// Reconstruction cells not touched by any ray (nonzero count means
    /// A^T A has zeros on its diagonal and the null-space premise fails).
    std::size_t untouched_columns() const {
        std::vector<bool> hit(n_cols(), false);
        for (std::uint32_t c : col_indices) hit[c] = true;
        return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), false));
    }

    /// Structural invariants; run after deserialization.
    void validate() const {
        if (row_offsets.size() != n_rows() + 1) throw shape_error("operator: bad row offset table");
        if (row_offsets.front() != 0 || row_offsets.back() != nnz())
            throw shape_error("operator: row offsets do not cover the entry arrays");
        if (col_indices.size() != coefficients.size()) throw shape_error("operator: index/value size mismatch");
        for (std::size_t row = 0; row < n_rows(); ++row) {
            if (row_offsets[row] > row_offsets[row + 1]) throw shape_error("operator: descending row offsets");
            for (std::uint64_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k) {
                if (col_indices[k] >= n_cols()) throw shape_error("operator: column index out of range");
                if (k > row_offsets[row] && col_indices[k] <= col_indices[k - 1])
                    throw shape_error("operator: column indices not strictly increasing");
                if (!(coefficients[k] >= 0.0)) throw numeric_error("operator: negative chord coefficient");
            }
        }
    }
};

/// Assemble the projection operator for one ray per detector pixel, through
/// the pixel center. Coefficient ((i,j), (i',j')) is the chord length of
/// ray (i,j) inside annulus (i',j'). Requires detector pitch = ξ * recon
/// pitch on both axes.
inline SparseOperator build_operator(const ImagingGeometry& g, const GridGeom& recon, const GridGeom& det,
                                     int threads = 1) {
    if (recon.rows == 0 || recon.cols == 0 || det.rows == 0 || det.cols == 0)
        throw shape_error("build_operator: empty grid");
    if (recon.origin_col < 0.0) throw geometry_error("build_operator: negative reconstruction radii");
    const double xi = magnification(g);
    auto pitch_ok = [](double got, double want) { return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)); };
    if (!pitch_ok(recon.spacing_col * xi, det.spacing_col) || !pitch_ok(recon.spacing_row * xi, det.spacing_row))
        throw geometry_error("build_operator: detector pitch is not magnification * reconstruction pitch");
    if (g.detector_pitch > 0.0 && !pitch_ok(g.detector_pitch, det.spacing_col))
        throw geometry_error("build_operator: detector grid pitch disagrees with the imaging geometry");
    const double r_max = recon.col_edge(recon.cols);
    if (g.z_source < r_max || g.z_detector < r_max)
        throw geometry_error("build_operator: object extends past the source or detector plane");
    if (g.mode == BeamMode::ConeBeam && !(g.z_detector > 0.0))
        throw geometry_error("build_operator: cone beam requires a positive detector distance");

    const std::size_t n_det = det.size();
    const std::size_t n_rec_cols = recon.cols;
    const double y0 = recon.row_edge(0);
    const double y1 = recon.row_edge(recon.rows);

    struct Block {
        std::vector<std::uint64_t> counts;  // entries per detector row handled here
        std::vector<std::uint32_t> cols;
        std::vector<double> vals;
    };
    const std::size_t nthreads = threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), n_det);
    const std::size_t chunk = (n_det + nthreads - 1) / nthreads;
    std::vector<Block> blocks(nthreads);

    parallel_for(nthreads, static_cast<int>(nthreads), [&](std::size_t wlo, std::size_t whi) {
        for (std::size_t w = wlo; w < whi; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(n_det, lo + chunk);
            Block& blk = blocks[w];
            blk.counts.assign(hi > lo ? hi - lo : 0, 0);
            for (std::size_t pix = lo; pix < hi; ++pix) {
                const std::size_t i_det = pix / det.cols, j_det = pix % det.cols;
                const Ray ray = ray_for_pixel(g, det.col_center(j_det), det.row_center(i_det));
                const auto q = detail::AxisQuadratic::from_ray(ray);
                const double dlen =
                    std::sqrt(ray.dir[0] * ray.dir[0] + ray.dir[1] * ray.dir[1] + ray.dir[2] * ray.dir[2]);
                const double sy = ray.origin[1], dy = ray.dir[1];

                // Slab rows crossed by y(t) = sy + t*dy, t in [0, 1].
                std::size_t row_a = 0, row_b = 0;
                double glo = 0.0, ghi = 1.0;
                if (dy == 0.0) {
                    if (!(sy >= y0 && sy < y1)) continue;
                    row_a = row_b = static_cast<std::size_t>((sy - y0) / recon.spacing_row);
                    if (row_a >= recon.rows) row_a = row_b = recon.rows - 1;
                } else {
                    double t0 = (y0 - sy) / dy, t1 = (y1 - sy) / dy;
                    if (t0 > t1) std::swap(t0, t1);
                    glo = std::max(glo, t0);
                    ghi = std::min(ghi, t1);
                    if (ghi <= glo) continue;
                    auto row_of = [&](double t) {
                        const double yy = sy + t * dy;
                        double idx = std::floor((yy - y0) / recon.spacing_row);
                        return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(recon.rows - 1)));
                    };
                    row_a = row_of(glo);
                    row_b = row_of(ghi);
                    if (row_a > row_b) std::swap(row_a, row_b);
                }

                std::uint64_t count = 0;
                for (std::size_t ir = row_a; ir <= row_b; ++ir) {
                    double wa = glo, wb = ghi;
                    if (dy != 0.0) {
                        double t0 = (recon.row_edge(ir) - sy) / dy;
                        double t1 = (recon.row_edge(ir + 1) - sy) / dy;
                        if (t0 > t1) std::swap(t0, t1);
                        wa = std::max(wa, t0);
                        wb = std::min(wb, t1);
                        if (wb <= wa) continue;
                    }

                    // Radial range spanned inside this slab window.
                    double qmin = std::min(q.at(wa), q.at(wb));
                    const double qmax = std::max(q.at(wa), q.at(wb));
                    if (q.a > 0.0) {
                        const double tv = -q.b / (2.0 * q.a);
                        if (tv > wa && tv < wb) qmin = std::min(qmin, q.at(tv));
                    }
                    const double rmin = std::sqrt(std::max(qmin, 0.0));
                    const double rmax = std::sqrt(std::max(qmax, 0.0));
                    if (rmin >= recon.col_edge(recon.cols)) continue;
                    if (rmax <= recon.col_edge(0)) continue;

                    auto shell_of = [&](double r) {
                        double idx = std::floor((r - recon.origin_col) / recon.spacing_col);
                        return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n_rec_cols - 1)));
                    };
                    const std::size_t j_lo = shell_of(rmin);
                    const std::size_t j_hi = shell_of(rmax);

                    double prev = q.sublevel_length(recon.col_edge(j_lo), wa, wb);
                    for (std::size_t jr = j_lo; jr <= j_hi; ++jr) {
                        const double cur = q.sublevel_length(recon.col_edge(jr + 1), wa, wb);
                        const double chord = (cur - prev) * dlen;
                        prev = cur;
                        if (chord > 0.0) {
                            blk.cols.push_back(static_cast<std::uint32_t>(ir * n_rec_cols + jr));
                            blk.vals.push_back(chord);
                            ++count;
                        }
                    }
                }
                blk.counts[pix - lo] = count;
            }
        }
    });

    SparseOperator op;
    op.recon = recon;
    op.detector = det;
    op.row_offsets.assign(n_det + 1, 0);
    std::size_t total = 0;
    for (const auto& blk : blocks) total += blk.vals.size();
    op.col_indices.reserve(total);
    op.coefficients.reserve(total);
    std::uint64_t off = 0;
    for (std::size_t w = 0; w < blocks.size(); ++w) {
        const std::size_t lo = w * chunk;
        for (std::size_t r = 0; r < blocks[w].counts.size(); ++r) {
            op.row_offsets[lo + r] = off;
            off += blocks[w].counts[r];
        }
        op.col_indices.insert(op.col_indices.end(), blocks[w].cols.begin(), blocks[w].cols.end());
        op.coefficients.insert(op.coefficients.end(), blocks[w].vals.begin(), blocks[w].vals.end());
    }
    op.row_offsets[n_det] = off;
    return op;
}

}  // namespace abl
