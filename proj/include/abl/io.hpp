#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abl/abelop.hpp"
#include "abl/core.hpp"
#include "abl/grid.hpp"

namespace abl {

namespace detail {

inline void put_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out) throw io_error("write failed");
}

inline void get_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n)) throw io_error(std::string("unexpected end of file reading ") + what);
}

// Little-endian on-disk layout; core.hpp static-asserts the host matches.
inline void put_u32(std::ostream& o, std::uint32_t v) { put_bytes(o, &v, 4); }
inline void put_u64(std::ostream& o, std::uint64_t v) { put_bytes(o, &v, 8); }
inline void put_f64(std::ostream& o, double v) { put_bytes(o, &v, 8); }
inline std::uint32_t get_u32(std::istream& i, const char* w) { std::uint32_t v; get_bytes(i, &v, 4, w); return v; }
inline std::uint64_t get_u64(std::istream& i, const char* w) { std::uint64_t v; get_bytes(i, &v, 8, w); return v; }
inline double get_f64(std::istream& i, const char* w) { double v; get_bytes(i, &v, 8, w); return v; }

inline void put_geom(std::ostream& o, const GridGeom& g) {
    put_u64(o, g.rows);
    put_u64(o, g.cols);
    put_f64(o, g.spacing_row);
    put_f64(o, g.spacing_col);
    put_f64(o, g.origin_row);
    put_f64(o, g.origin_col);
}

inline GridGeom get_geom(std::istream& i, const char* w) {
    GridGeom g;
    g.rows = get_u64(i, w);
    g.cols = get_u64(i, w);
    g.spacing_row = get_f64(i, w);
    g.spacing_col = get_f64(i, w);
    g.origin_row = get_f64(i, w);
    g.origin_col = get_f64(i, w);
    if (g.rows == 0 || g.cols == 0 || g.rows > (1u << 24) || g.cols > (1u << 24))
        throw io_error(std::string(w) + ": implausible grid dimensions");
    if (!(g.spacing_row > 0.0) || !(g.spacing_col > 0.0)) throw io_error(std::string(w) + ": non-positive grid spacing");
    return g;
}

inline void check_magic(std::istream& in, const char (&magic)[5], const char* what) {
    char buf[4];
    get_bytes(in, buf, 4, what);
    if (std::memcmp(buf, magic, 4) != 0) throw io_error(std::string(what) + ": bad magic bytes");
}

/// Shortest round-trippable decimal rendering (17 significant digits).
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// --- ABLG: binary field ------------------------------------------------------
// magic 'ABLG', version u32 = 1, rows u64, cols u64, spacing_row f64,
// spacing_col f64, origin_row f64, origin_col f64, rows*cols f64 row-major.

inline void write_ablg(const Field2D& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    detail::put_bytes(out, "ABLG", 4);
    detail::put_u32(out, 1);
    detail::put_geom(out, f.geom());
    detail::put_bytes(out, f.values.data(), f.values.size() * sizeof(double));
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

inline Field2D read_ablg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    detail::check_magic(in, "ABLG", "field file");
    const std::uint32_t ver = detail::get_u32(in, "field version");
    if (ver != 1) throw io_error("field file '" + path + "': unsupported version " + std::to_string(ver));
    const GridGeom g = detail::get_geom(in, "field header");
    Field2D f = Field2D::zeros(g);
    detail::get_bytes(in, f.values.data(), f.values.size() * sizeof(double), "field values");
    return f;
}

// --- ABLA: cached projection operator ----------------------------------------
// magic 'ABLA', version u32 = 1, beam mode u32, z_source f64, z_detector f64,
// detector_pitch f64, recon GridGeom, detector GridGeom, nnz u64, row offsets
// (n_rows + 1) u64, column indices u32, coefficients f64.

struct OperatorFile {
    ImagingGeometry geometry;
    SparseOperator op;
};

inline void write_abla(const ImagingGeometry& geom, const SparseOperator& op, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    detail::put_bytes(out, "ABLA", 4);
    detail::put_u32(out, 1);
    detail::put_u32(out, geom.mode == BeamMode::ConeBeam ? 1u : 0u);
    detail::put_f64(out, geom.z_source);
    detail::put_f64(out, geom.z_detector);
    detail::put_f64(out, geom.detector_pitch);
    detail::put_geom(out, op.recon);
    detail::put_geom(out, op.detector);
    detail::put_u64(out, op.nnz());
    detail::put_bytes(out, op.row_offsets.data(), op.row_offsets.size() * sizeof(std::uint64_t));
    detail::put_bytes(out, op.col_indices.data(), op.col_indices.size() * sizeof(std::uint32_t));
    detail::put_bytes(out, op.coefficients.data(), op.coefficients.size() * sizeof(double));
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

inline OperatorFile read_abla(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    detail::check_magic(in, "ABLA", "operator file");
    const std::uint32_t ver = detail::get_u32(in, "operator version");
    if (ver != 1) throw io_error("operator file '" + path + "': unsupported version " + std::to_string(ver));
    OperatorFile of;
    of.geometry.mode = detail::get_u32(in, "beam mode") ? BeamMode::ConeBeam : BeamMode::ParallelBeam;
    of.geometry.z_source = detail::get_f64(in, "z_source");
    of.geometry.z_detector = detail::get_f64(in, "z_detector");
    of.geometry.detector_pitch = detail::get_f64(in, "detector pitch");
    of.op.recon = detail::get_geom(in, "reconstruction grid");
    of.op.detector = detail::get_geom(in, "detector grid");
    const std::uint64_t nnz = detail::get_u64(in, "entry count");
    of.op.row_offsets.resize(of.op.n_rows() + 1);
    detail::get_bytes(in, of.op.row_offsets.data(), of.op.row_offsets.size() * sizeof(std::uint64_t), "row offsets");
    of.op.col_indices.resize(nnz);
    detail::get_bytes(in, of.op.col_indices.data(), nnz * sizeof(std::uint32_t), "column indices");
    of.op.coefficients.resize(nnz);
    detail::get_bytes(in, of.op.coefficients.data(), nnz * sizeof(double), "coefficients");
    of.op.validate();
    return of;
}

// --- operator cache -----------------------------------------------------------

inline std::string operator_cache_key(const ImagingGeometry& geom, const GridGeom& recon, const GridGeom& det) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(geometry_hash(geom, recon, det)));
    return buf;
}

/// Builds the operator, or loads it from `cache_dir` when a file for this
/// geometry already exists there (writing it on first build). The cached
/// header is cross-checked against the request; any mismatch falls back to a
/// fresh build that overwrites the stale file.
inline SparseOperator load_or_build_operator(const ImagingGeometry& geom, const GridGeom& recon, const GridGeom& det,
                                             int threads = 1, const std::optional<std::string>& cache_dir = std::nullopt) {
    if (!cache_dir) return build_operator(geom, recon, det, threads);
    const std::filesystem::path path =
        std::filesystem::path(*cache_dir) / ("op_" + operator_cache_key(geom, recon, det) + ".abla");
    if (std::filesystem::exists(path)) {
        try {
            OperatorFile of = read_abla(path.string());
            if (of.geometry.mode == geom.mode && of.geometry.z_source == geom.z_source &&
                of.geometry.z_detector == geom.z_detector && of.geometry.detector_pitch == geom.detector_pitch &&
                of.op.recon == recon && of.op.detector == det)
                return std::move(of.op);
        } catch (const io_error&) {
            // unreadable cache entry: rebuild below
        }
    }
    SparseOperator op = build_operator(geom, recon, det, threads);
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir, ec);
    write_abla(geom, op, path.string());
    return op;
}

// --- sinogram export ----------------------------------------------------------
// The single view replicated over a uniform half-circle of angles, one
// sinogram block per detector row (y slice). magic 'ABLS', version u32 = 1,
// n_slices u64, n_angles u64, n_cols u64, dtheta f64 (degrees), then per
// slice n_angles * n_cols f64 row-major (angle-major).

inline void export_sinogram(const Field2D& d, double dtheta_deg, const std::string& path,
                            std::optional<std::size_t> only_row = std::nullopt) {
    if (!(dtheta_deg > 0.0)) throw numeric_error("export_sinogram: dtheta must be positive");
    const double ratio = 180.0 / dtheta_deg;
    const auto n_angles = static_cast<std::uint64_t>(std::llround(ratio));
    if (n_angles < 1 || std::abs(ratio - static_cast<double>(n_angles)) > 1e-9 * ratio)
        throw numeric_error("export_sinogram: dtheta must divide 180 degrees");
    if (only_row && *only_row >= d.rows) throw shape_error("export_sinogram: row index out of range");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    const std::size_t first = only_row ? *only_row : 0;
    const std::size_t last = only_row ? *only_row + 1 : d.rows;
    detail::put_bytes(out, "ABLS", 4);
    detail::put_u32(out, 1);
    detail::put_u64(out, last - first);
    detail::put_u64(out, n_angles);
    detail::put_u64(out, d.cols);
    detail::put_f64(out, dtheta_deg);
    for (std::size_t i = first; i < last; ++i)
        for (std::uint64_t a = 0; a < n_angles; ++a)
            detail::put_bytes(out, &d.values[i * d.cols], d.cols * sizeof(double));
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

// --- CSV ------------------------------------------------------------------------

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::g17(row[i]);
        out << "\n";
    }
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

inline void write_field_csv(const Field2D& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < f.rows; ++i) {
        for (std::size_t j = 0; j < f.cols; ++j) out << (j ? "," : "") << detail::g17(f(i, j));
        out << "\n";
    }
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

/// Plain numeric matrix (comma or whitespace separated); grid metadata is the
/// caller's to supply since CSV carries none.
inline Field2D read_field_csv(const std::string& path, double spacing_row, double spacing_col, double origin_row = 0.0,
                              double origin_col = 0.0) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (auto& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream iss(line);
        std::vector<double> row;
        double v;
        while (iss >> v) row.push_back(v);
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error(path + ": line " + std::to_string(line_no) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error(path + ": no numeric data");
    Field2D f = make_field(rows.size(), rows.front().size(), spacing_row, spacing_col, origin_row, origin_col);
    for (std::size_t i = 0; i < f.rows; ++i)
        for (std::size_t j = 0; j < f.cols; ++j) f(i, j) = rows[i][j];
    return f;
}

// --- 16-bit grayscale preview -----------------------------------------------
// Min-max windowed; presentation only, no numeric contract.

inline void write_pgm16(const Field2D& f, const std::string& path) {
    double lo = f.values[0], hi = f.values[0];
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "P5\n" << f.cols << " " << f.rows << "\n65535\n";
    std::vector<unsigned char> row(f.cols * 2);
    for (std::size_t i = 0; i < f.rows; ++i) {
        for (std::size_t j = 0; j < f.cols; ++j) {
            const auto q = static_cast<std::uint16_t>(std::lround((f(i, j) - lo) * scale));
            row[2 * j] = static_cast<unsigned char>(q >> 8);  // PGM samples are big-endian
            row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
        }
        detail::put_bytes(out, row.data(), row.size());
    }
    if (!out.flush()) throw io_error("write failed for '" + path + "'");
}

}  // namespace abl
