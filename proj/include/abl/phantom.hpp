#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abl/core.hpp"
#include "abl/grid.hpp"

namespace abl {

// Analytic axially-symmetric phantom: spherically-symmetric components with
// one of three radial profiles, plus constant-valued annular boxes in the
// (r, y) half-plane. All closed-form, so the parallel-beam projection is
// known exactly.
struct PhantomSpec {
    struct Sphere {
        int kind = 1;            // radial profile, see eval_radial
        double amplitude = 0.0;  // g/cm^3
        double nu = 0.0;         // spherical radius, cm
    };
    struct Annulus {
        double amplitude = 0.0;             // g/cm^3
        double r_lo = 0.0, r_hi = 0.0;      // cm
        double y_lo = 0.0, y_hi = 0.0;      // cm
    };
    std::vector<Sphere> spheres;
    std::vector<Annulus> annuli;

    void validate() const {
        for (const auto& s : spheres) {
            if (s.kind < 1 || s.kind > 3) throw parse_error("phantom: sphere kind must be 1, 2 or 3");
            if (!(s.nu > 0.0)) throw parse_error("phantom: sphere radius must be positive");
            if (!std::isfinite(s.amplitude)) throw parse_error("phantom: non-finite sphere amplitude");
        }
        for (const auto& a : annuli) {
            if (!(a.r_lo >= 0.0 && a.r_lo < a.r_hi)) throw parse_error("phantom: annulus radii must satisfy 0 <= r_lo < r_hi");
            if (!(a.y_lo < a.y_hi)) throw parse_error("phantom: annulus y bounds must satisfy y_lo < y_hi");
            if (!std::isfinite(a.amplitude)) throw parse_error("phantom: non-finite annulus amplitude");
        }
    }
};

/// Radius of the circle cut from a sphere of radius nu at height y:
/// sqrt(nu^2 - y^2), or 0 where the sphere is absent (|y| >= |nu|).
/// The sign of nu carries no geometric meaning and is ignored.
inline double delta(double y, double nu) {
    const double a = std::abs(nu);
    if (std::abs(y) >= a) return 0.0;
    return std::sqrt(a * a - y * y);
}

/// Radial profiles on 0 <= r <= delta (0 outside):
///   kind 1: 1
///   kind 2: sqrt(delta^2 - r^2)
///   kind 3: (delta^2 - r^2)^(3/2)
inline double eval_radial(int kind, double r, double delta_) {
    if (kind < 1 || kind > 3) throw numeric_error("eval_radial: kind must be 1, 2 or 3");
    if (delta_ <= 0.0 || r > delta_ || r < 0.0) return 0.0;
    const double dd = delta_ * delta_ - r * r;
    switch (kind) {
        case 1: return 1.0;
        case 2: return std::sqrt(dd);
        default: return dd * std::sqrt(dd);
    }
}

/// Exact parallel-beam line integrals of the radial profiles at offset x:
///   kind 1: 2 sqrt(delta^2 - x^2)
///   kind 2: (pi/2) (delta^2 - x^2)
///   kind 3: (3 pi/8) (delta^2 - x^2)^2
inline double eval_projection(int kind, double x, double delta_) {
    if (kind < 1 || kind > 3) throw numeric_error("eval_projection: kind must be 1, 2 or 3");
    if (delta_ <= 0.0 || std::abs(x) > delta_) return 0.0;
    const double dd = delta_ * delta_ - x * x;
    switch (kind) {
        case 1: return 2.0 * std::sqrt(dd);
        case 2: return 0.5 * std::numbers::pi * dd;
        default: return 0.375 * std::numbers::pi * dd * dd;
    }
}

/// Density field sampled at cell centers of a (rows = y, cols = r) grid.
inline Field2D render(const PhantomSpec& spec, const GridGeom& g) {
    spec.validate();
    Field2D f = Field2D::zeros(g);
    for (std::size_t i = 0; i < g.rows; ++i) {
        const double y = g.row_center(i);
        for (std::size_t j = 0; j < g.cols; ++j) {
            const double r = g.col_center(j);
            double s = 0.0;
            for (const auto& sp : spec.spheres) s += sp.amplitude * eval_radial(sp.kind, r, delta(y, sp.nu));
            for (const auto& an : spec.annuli)
                if (r >= an.r_lo && r < an.r_hi && y >= an.y_lo && y < an.y_hi) s += an.amplitude;
            f(i, j) = s;
        }
    }
    return f;
}

/// Exact parallel-beam projection sampled at detector pixel centers of a
/// (rows = y, cols = x) grid. Annular boxes project to chord differences
/// amplitude * (chord(r_hi, x) - chord(r_lo, x)), chord(p, x) = 2 sqrt((p^2 - x^2)+).
/// Valid for magnification 1 only; cone-beam views come from the discrete operator.
inline Field2D render_projection(const PhantomSpec& spec, const GridGeom& g) {
    spec.validate();
    auto chord = [](double radius, double x) {
        const double dd = radius * radius - x * x;
        return dd > 0.0 ? 2.0 * std::sqrt(dd) : 0.0;
    };
    Field2D p = Field2D::zeros(g);
    for (std::size_t i = 0; i < g.rows; ++i) {
        const double y = g.row_center(i);
        for (std::size_t j = 0; j < g.cols; ++j) {
            const double x = g.col_center(j);
            double s = 0.0;
            for (const auto& sp : spec.spheres) s += sp.amplitude * eval_projection(sp.kind, x, delta(y, sp.nu));
            for (const auto& an : spec.annuli)
                if (y >= an.y_lo && y < an.y_hi) s += an.amplitude * (chord(an.r_hi, x) - chord(an.r_lo, x));
            p(i, j) = s;
        }
    }
    return p;
}

/// Adds i.i.d. Gaussian noise with standard deviation sigma_frac * max|d|.
/// sigma_frac = 0 returns the input bit-for-bit (the RNG is never touched).
inline Field2D add_noise(const Field2D& d, double sigma_frac, std::uint64_t seed) {
    if (sigma_frac < 0.0 || !std::isfinite(sigma_frac)) throw numeric_error("add_noise: sigma_frac must be >= 0");
    Field2D out = d;
    if (sigma_frac == 0.0) return out;
    const double sigma = sigma_frac * max_abs(d);
    Rng rng(seed);
    for (auto& v : out.values) v += sigma * gaussian(rng);
    return out;
}

// --- spec file parsing ------------------------------------------------------
//
// Stanza-per-component text format:
//
//   [sphere]
//   kind = 2
//   amplitude = 1.0
//   nu = 1.25
//
//   [annulus]
//   amplitude = 1.5
//   r = 3.2 3.95
//   y = -4.1 -3.35
//
// '#' starts a comment; blank lines separate nothing in particular.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& tok, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw parse_error("line " + std::to_string(line_no) + ": expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw parse_error("line " + std::to_string(line_no) + ": trailing characters after number in '" + tok + "'");
    return v;
}

inline std::vector<double> parse_numbers(const std::string& text, std::size_t line_no) {
    std::vector<double> out;
    std::istringstream iss(text);
    std::string tok;
    while (iss >> tok) out.push_back(parse_number(tok, line_no));
    return out;
}

}  // namespace detail

inline PhantomSpec parse_phantom_text(const std::string& text) {
    PhantomSpec spec;
    enum class Stanza { None, Sphere, Annulus };
    Stanza cur = Stanza::None;
    PhantomSpec::Sphere sphere;
    PhantomSpec::Annulus annulus;
    // Per-stanza bookkeeping so missing keys are reported with the header line.
    std::size_t stanza_line = 0;
    bool saw_kind = false, saw_amp = false, saw_nu = false, saw_r = false, saw_y = false;

    auto finish = [&]() {
        if (cur == Stanza::Sphere) {
            if (!saw_kind || !saw_amp || !saw_nu)
                throw parse_error("line " + std::to_string(stanza_line) + ": [sphere] needs kind, amplitude and nu");
            spec.spheres.push_back(sphere);
        } else if (cur == Stanza::Annulus) {
            if (!saw_amp || !saw_r || !saw_y)
                throw parse_error("line " + std::to_string(stanza_line) + ": [annulus] needs amplitude, r and y");
            spec.annuli.push_back(annulus);
        }
        cur = Stanza::None;
        saw_kind = saw_amp = saw_nu = saw_r = saw_y = false;
    };

    std::istringstream iss(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(iss, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            finish();
            stanza_line = line_no;
            if (line == "[sphere]") {
                cur = Stanza::Sphere;
                sphere = {};
            } else if (line == "[annulus]") {
                cur = Stanza::Annulus;
                annulus = {};
            } else {
                throw parse_error("line " + std::to_string(line_no) + ": unknown stanza '" + line + "'");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw parse_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (cur == Stanza::None) throw parse_error("line " + std::to_string(line_no) + ": '" + key + "' outside any stanza");

        if (cur == Stanza::Sphere) {
            if (key == "kind") {
                sphere.kind = static_cast<int>(detail::parse_number(val, line_no));
                saw_kind = true;
            } else if (key == "amplitude") {
                sphere.amplitude = detail::parse_number(val, line_no);
                saw_amp = true;
            } else if (key == "nu") {
                sphere.nu = std::abs(detail::parse_number(val, line_no));
                saw_nu = true;
            } else {
                throw parse_error("line " + std::to_string(line_no) + ": unknown sphere key '" + key + "'");
            }
        } else {
            if (key == "amplitude") {
                annulus.amplitude = detail::parse_number(val, line_no);
                saw_amp = true;
            } else if (key == "r" || key == "y") {
                const auto nums = detail::parse_numbers(val, line_no);
                if (nums.size() != 2)
                    throw parse_error("line " + std::to_string(line_no) + ": '" + key + "' needs two values (lo hi)");
                if (key == "r") {
                    annulus.r_lo = nums[0];
                    annulus.r_hi = nums[1];
                    saw_r = true;
                } else {
                    annulus.y_lo = nums[0];
                    annulus.y_hi = nums[1];
                    saw_y = true;
                }
            } else {
                throw parse_error("line " + std::to_string(line_no) + ": unknown annulus key '" + key + "'");
            }
        }
    }
    finish();
    spec.validate();
    return spec;
}

inline PhantomSpec parse_phantom_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open phantom spec '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_phantom_text(buf.str());
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

}  // namespace abl
