#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "abl/core.hpp"
#include "abl/grid.hpp"

namespace abl {

struct MetricReport {
    double rmse = 0.0;
    double ssim = 0.0;
    std::optional<double> cnr;
    std::size_t block_size = 10;
    double c1 = 0.0, c2 = 0.0;
};

/// ||u - u_ref||_2 / N with N the pixel count. This is the form used for the
/// reported scores; note it is NOT the conventional sqrt-mean-square (that is
/// rmse_conventional below), so values are grid-size dependent.
inline double rmse(const Field2D& u, const Field2D& ref) {
    if (!u.same_shape(ref)) throw shape_error("rmse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double e = u.values[i] - ref.values[i];
        s += e * e;
    }
    return std::sqrt(s) / static_cast<double>(u.values.size());
}

/// Conventional root mean square error ||u - u_ref||_2 / sqrt(N).
inline double rmse_conventional(const Field2D& u, const Field2D& ref) {
    if (!u.same_shape(ref)) throw shape_error("rmse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double e = u.values[i] - ref.values[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(u.values.size()));
}

namespace detail {

inline double ssim_impl(const Field2D& u, const Field2D& ref, std::size_t block, double* c1_out, double* c2_out) {
    if (!u.same_shape(ref)) throw shape_error("ssim: shape mismatch");
    if (block < 2) throw numeric_error("ssim: block size must be at least 2");
    const std::size_t nbr = u.rows / block, nbc = u.cols / block;
    if (nbr == 0 || nbc == 0) throw shape_error("ssim: field smaller than one block");

    // Dynamic range of the reference; a flat reference degenerates, in which
    // case identical inputs score 1 and otherwise the range is taken as 1.
    double lo = ref.values[0], hi = ref.values[0];
    for (double v : ref.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double range = hi - lo;
    if (range == 0.0 && u.values == ref.values) {
        if (c1_out) *c1_out = 0.0;
        if (c2_out) *c2_out = 0.0;
        return 1.0;
    }
    if (range == 0.0) range = 1.0;
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);
    if (c1_out) *c1_out = c1;
    if (c2_out) *c2_out = c2;

    const double n = static_cast<double>(block * block);
    double total = 0.0;
    for (std::size_t bi = 0; bi < nbr; ++bi) {
        for (std::size_t bj = 0; bj < nbc; ++bj) {
            double mu_v = 0.0, mu_w = 0.0;
            for (std::size_t i = 0; i < block; ++i)
                for (std::size_t j = 0; j < block; ++j) {
                    mu_v += u(bi * block + i, bj * block + j);
                    mu_w += ref(bi * block + i, bj * block + j);
                }
            mu_v /= n;
            mu_w /= n;
            double sv = 0.0, sw = 0.0, svw = 0.0;
            for (std::size_t i = 0; i < block; ++i)
                for (std::size_t j = 0; j < block; ++j) {
                    const double a = u(bi * block + i, bj * block + j) - mu_v;
                    const double b = ref(bi * block + i, bj * block + j) - mu_w;
                    sv += a * a;
                    sw += b * b;
                    svw += a * b;
                }
            sv /= n - 1.0;  // unbiased block statistics
            sw /= n - 1.0;
            svw /= n - 1.0;
            total += (2.0 * mu_v * mu_w + c1) * (2.0 * svw + c2) /
                     ((mu_v * mu_v + mu_w * mu_w + c1) * (sv + sw + c2));
        }
    }
    return total / static_cast<double>(nbr * nbc);
}

}  // namespace detail

/// Mean of per-block structural similarity over an exact tiling of
/// block x block squares (trailing partial blocks are dropped). Stabilizing
/// constants c1 = (0.01 L)^2, c2 = (0.03 L)^2 with L the dynamic range of the
/// reference.
inline double ssim(const Field2D& u, const Field2D& ref, std::size_t block = 10) {
    return detail::ssim_impl(u, ref, block, nullptr, nullptr);
}

/// Contrast-to-noise ratio between the below-threshold region and its
/// complement: |mean1 - mean2| / |sigma1 - sigma2| with population standard
/// deviations. Equal sigmas return infinity (degenerate denominator).
inline double cnr(const Field2D& d, double threshold = 0.5) {
    double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (double v : d.values) {
        if (v < threshold) {
            s1 += v;
            ++n1;
        } else {
            s2 += v;
            ++n2;
        }
    }
    if (n1 == 0 || n2 == 0) throw numeric_error("cnr: one threshold class is empty");
    const double m1 = s1 / static_cast<double>(n1), m2 = s2 / static_cast<double>(n2);
    for (double v : d.values) {
        if (v < threshold)
            q1 += (v - m1) * (v - m1);
        else
            q2 += (v - m2) * (v - m2);
    }
    const double sd1 = std::sqrt(q1 / static_cast<double>(n1));
    const double sd2 = std::sqrt(q2 / static_cast<double>(n2));
    const double denom = std::abs(sd1 - sd2);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(m1 - m2) / denom;
}

inline MetricReport evaluate(const Field2D& u, const Field2D& ref, std::size_t block = 10,
                             std::optional<double> cnr_threshold = std::nullopt) {
    MetricReport rep;
    rep.block_size = block;
    rep.rmse = rmse(u, ref);
    rep.ssim = detail::ssim_impl(u, ref, block, &rep.c1, &rep.c2);
    if (cnr_threshold) rep.cnr = cnr(u, *cnr_threshold);
    return rep;
}

}  // namespace abl
