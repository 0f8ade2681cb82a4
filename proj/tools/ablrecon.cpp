// ablrecon: batch front end for single-view axially-symmetric reconstruction.
//
// Subcommands: phantom, project, reconstruct, evaluate, lineout,
// export-sinogram, info. Fields travel as ABLG binaries (plus optional CSV
// and 16-bit PGM previews); assembled operators can be cached as ABLA files.
//
// Exit codes: 0 success, 2 invalid configuration or inputs, 3 numerical
// failure, 4 I/O failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abl/abl.hpp"

namespace {

struct GeometryOptions {
    std::string mode = "parallel";
    double z_source = 50.0;
    double z_detector = 50.0;
    std::optional<double> xi;  // magnification override, repositions the detector
    int threads = 1;
    std::string cache_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "Beam geometry: parallel or cone")
            ->check(CLI::IsMember({"parallel", "cone"}))
            ->capture_default_str();
        cmd->add_option("--z-source", z_source, "Source distance from the object plane, cm")->capture_default_str();
        cmd->add_option("--z-detector", z_detector, "Detector distance from the object plane, cm")
            ->capture_default_str();
        cmd->add_option_function<double>(
            "--xi", [this](const double& v) { xi = v; },
            "Magnification override; cone mode moves the detector to z_source*(xi-1)");
        cmd->add_option("--threads", threads, "Worker threads for operator assembly/apply")->capture_default_str();
        cmd->add_option("--cache-dir", cache_dir, "Operator cache directory (default: $ABL_CACHE_DIR if set)");
    }

    abl::ImagingGeometry resolve(double recon_pitch_col) const {
        abl::ImagingGeometry g;
        g.mode = mode == "cone" ? abl::BeamMode::ConeBeam : abl::BeamMode::ParallelBeam;
        g.z_source = z_source;
        g.z_detector = z_detector;
        if (xi) {
            if (g.mode == abl::BeamMode::ParallelBeam) {
                if (*xi != 1.0) throw abl::geometry_error("--xi must be 1 in parallel mode");
            } else {
                if (!(*xi > 1.0)) throw abl::geometry_error("--xi must exceed 1 in cone mode");
                g.z_detector = g.z_source * (*xi - 1.0);
            }
        }
        g.detector_pitch = recon_pitch_col * abl::magnification(g);
        return g;
    }

    std::optional<std::string> cache() const {
        if (!cache_dir.empty()) return cache_dir;
        if (const char* env = std::getenv("ABL_CACHE_DIR"); env && *env) return std::string(env);
        return std::nullopt;
    }
};

void write_field_outputs(const abl::Field2D& f, const std::string& stem, bool csv) {
    abl::write_ablg(f, stem + ".ablg");
    abl::write_pgm16(f, stem + ".pgm");
    if (csv) abl::write_field_csv(f, stem + ".csv");
}

// Detector grid covering the magnified shadow of a reconstruction grid.
abl::GridGeom detector_for(const abl::GridGeom& recon, double xi, bool half) {
    const double r_out = recon.col_edge(recon.cols);
    const auto shells = static_cast<std::size_t>(std::llround(r_out / recon.spacing_col));
    abl::GridGeom det;
    det.rows = recon.rows;
    det.spacing_row = recon.spacing_row * xi;
    det.origin_row = recon.origin_row * xi;
    det.spacing_col = recon.spacing_col * xi;
    det.cols = half ? shells : 2 * shells;
    det.origin_col = half ? 0.0 : -r_out * xi;
    return det;
}

// Inverse of detector_for: infer the reconstruction grid from a projection.
abl::GridGeom recon_for(const abl::GridGeom& det, double xi) {
    abl::GridGeom recon;
    recon.rows = det.rows;
    recon.spacing_row = det.spacing_row / xi;
    recon.origin_row = det.origin_row / xi;
    recon.spacing_col = det.spacing_col / xi;
    recon.origin_col = 0.0;
    const double width = static_cast<double>(det.cols) * det.spacing_col;
    const double tol = 1e-9 * det.spacing_col;
    if (std::abs(det.origin_col + 0.5 * width) <= tol) {
        if (det.cols % 2 != 0)
            throw abl::geometry_error("symmetric detector must have an even column count");
        recon.cols = det.cols / 2;
    } else if (std::abs(det.origin_col) <= tol) {
        recon.cols = det.cols;  // half detector, x >= 0
    } else {
        throw abl::geometry_error(
            "cannot infer the radial grid: detector x range is neither symmetric nor half-plane");
    }
    return recon;
}

abl::Field2D load_field(const std::string& path) { return abl::read_ablg(path); }

struct PhantomArgs {
    std::string spec_path;
    std::string out_prefix;
    std::size_t rows = 700, cols = 350;
    double ymin = -5.0, ymax = 5.0, rmax = 5.0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    bool csv = false;
};

int cmd_phantom(const PhantomArgs& a) {
    if (a.rows == 0 || a.cols == 0) throw abl::shape_error("grid dimensions must be positive");
    if (!(a.ymax > a.ymin) || !(a.rmax > 0.0)) throw abl::geometry_error("bad grid extents");
    const abl::PhantomSpec spec = abl::parse_phantom_file(a.spec_path);
    const double dy = (a.ymax - a.ymin) / static_cast<double>(a.rows);
    const double dr = a.rmax / static_cast<double>(a.cols);
    abl::GridGeom recon{a.rows, a.cols, dy, dr, a.ymin, 0.0};
    abl::GridGeom det{a.rows, 2 * a.cols, dy, dr, a.ymin, -a.rmax};

    write_field_outputs(abl::render(spec, recon), a.out_prefix + "_truth", a.csv);
    const abl::Field2D proj = abl::render_projection(spec, det);
    write_field_outputs(proj, a.out_prefix + "_proj", a.csv);
    if (a.noise > 0.0)
        write_field_outputs(abl::add_noise(proj, a.noise, a.seed), a.out_prefix + "_proj_noisy", a.csv);
    std::printf("phantom: %zu spheres, %zu annuli -> %s_{truth,proj%s}\n", spec.spheres.size(), spec.annuli.size(),
                a.out_prefix.c_str(), a.noise > 0.0 ? ",proj_noisy" : "");
    return 0;
}

struct ProjectArgs {
    std::string input;
    std::string out_prefix;
    GeometryOptions geo;
    bool half = false;
    bool csv = false;
};

int cmd_project(const ProjectArgs& a) {
    const abl::Field2D u = load_field(a.input);
    const abl::ImagingGeometry g = a.geo.resolve(u.spacing_col);
    const abl::GridGeom det = detector_for(u.geom(), abl::magnification(g), a.half);
    const abl::SparseOperator A = abl::load_or_build_operator(g, u.geom(), det, a.geo.threads, a.geo.cache());
    write_field_outputs(A.apply(u, a.geo.threads), a.out_prefix + "_proj", a.csv);
    std::printf("project: %zux%zu field -> %zux%zu view (nnz %zu)\n", u.rows, u.cols, det.rows, det.cols, A.nnz());
    return 0;
}

struct ReconstructArgs {
    std::string input;
    std::string method = "l1l2";
    std::string out_prefix;
    GeometryOptions geo;
    abl::SolverParams params;
    std::optional<double> lambda, rho1, rho2;
    std::optional<std::size_t> jmax;
    bool csv = false;
};

void write_metadata(const std::string& path, const ReconstructArgs& a, const abl::SparseOperator& A,
                    const abl::ReconResult& r, double seconds) {
    std::ofstream out(path);
    if (!out) throw abl::io_error("cannot open '" + path + "' for writing");
    out << "method " << a.method << "\n";
    out << "input " << a.input << "\n";
    out << "beam " << (a.geo.mode) << "\n";
    out << "z_source " << abl::detail::g17(a.geo.z_source) << "\n";
    out << "z_detector " << abl::detail::g17(a.geo.z_detector) << "\n";
    out << "recon_grid " << A.recon.rows << "x" << A.recon.cols << " spacing " << abl::detail::g17(A.recon.spacing_row)
        << " " << abl::detail::g17(A.recon.spacing_col) << " origin " << abl::detail::g17(A.recon.origin_row) << " "
        << abl::detail::g17(A.recon.origin_col) << "\n";
    out << "operator_nnz " << A.nnz() << "\n";
    out << "lambda " << abl::detail::g17(r.lambda_used) << "\n";
    out << "rho1 " << abl::detail::g17(r.rho1_used) << "\n";
    out << "rho2 " << abl::detail::g17(r.rho2_used) << "\n";
    out << "rho3 " << abl::detail::g17(r.rho3_used) << "\n";
    out << "eps " << abl::detail::g17(a.params.eps) << "\n";
    out << "alpha " << abl::detail::g17(a.params.alpha) << "\n";
    out << "beta " << abl::detail::g17(a.params.beta) << "\n";
    out << "cg_tol " << abl::detail::g17(a.params.cg_tol) << "\n";
    out << "cg_max_iter " << a.params.cg_max_iter << "\n";
    out << "seed " << r.seed << "\n";
    out << "threads " << a.geo.threads << "\n";
    out << "outer_iters " << r.outer_iters << "\n";
    out << "total_inner_iters " << r.total_inner_iters << "\n";
    out << "total_cg_iters " << r.total_cg_iters << "\n";
    out << "converged " << (r.converged ? "true" : "false") << "\n";
    out << "h_norm_min " << abl::detail::g17(r.h_norm_min) << "\n";
    out << "final_residual " << abl::detail::g17(r.residual_history.back()) << "\n";
    out << "final_objective " << abl::detail::g17(r.objective_history.back()) << "\n";
    out << "wall_seconds " << abl::detail::g17(seconds) << "\n";
}

int cmd_reconstruct(ReconstructArgs& a) {
    const abl::Field2D d = load_field(a.input);
    abl::GridGeom det = d.geom();
    // Resolve xi first from a provisional geometry so the recon grid can be inferred.
    abl::ImagingGeometry g0 = a.geo.resolve(1.0);
    const double xi = abl::magnification(g0);
    const abl::GridGeom recon = recon_for(det, xi);
    const abl::ImagingGeometry g = a.geo.resolve(recon.spacing_col);
    const abl::SparseOperator A = abl::load_or_build_operator(g, recon, det, a.geo.threads, a.geo.cache());

    a.params.lambda = a.lambda;
    a.params.rho1 = a.rho1;
    a.params.rho2 = a.rho2;
    a.params.threads = a.geo.threads;
    if (a.jmax) {
        if (a.method == "tv")
            a.params.tv_j_max = *a.jmax;
        else
            a.params.j_max = *a.jmax;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const abl::ReconResult r = a.method == "tv" ? abl::reconstruct_tv(A, d, a.params)
                                                : abl::reconstruct_l1l2(A, d, a.params);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_field_outputs(r.u, a.out_prefix + "_recon", a.csv);
    abl::write_ablg(r.u_raw, a.out_prefix + "_raw.ablg");
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.objective_history.size(); ++k)
        rows.push_back({static_cast<double>(k), r.objective_history[k], r.residual_history[k], r.h_norm_history[k],
                        r.rel_change_history[k]});
    abl::write_csv(a.out_prefix + "_diag.csv", {"k", "objective", "residual", "h_norm", "rel_change"}, rows);
    write_metadata(a.out_prefix + "_meta.txt", a, A, r, seconds);
    std::printf("reconstruct[%s]: outer=%zu inner=%zu cg=%zu converged=%s h_norm_min=%g (%.2fs)\n", a.method.c_str(),
                r.outer_iters, r.total_inner_iters, r.total_cg_iters, r.converged ? "true" : "false", r.h_norm_min,
                seconds);
    return 0;
}

struct EvaluateArgs {
    std::string truth;
    std::vector<std::string> recons;
    std::vector<std::string> labels;
    std::string out;
    std::size_t block = 10;
    std::optional<double> cnr_threshold;
};

int cmd_evaluate(const EvaluateArgs& a) {
    if (!a.labels.empty() && a.labels.size() != a.recons.size())
        throw abl::parse_error("--labels must match the number of --recon inputs");
    const abl::Field2D truth = load_field(a.truth);
    std::vector<std::string> header{"method", "rmse", "ssim"};
    if (a.cnr_threshold) header.push_back("cnr");
    std::ofstream out;
    std::ostream* os = &std::cout;
    if (!a.out.empty()) {
        out.open(a.out, std::ios::binary);
        if (!out) throw abl::io_error("cannot open '" + a.out + "' for writing");
        os = &out;
    }
    for (std::size_t i = 0; i < header.size(); ++i) (*os) << (i ? "," : "") << header[i];
    (*os) << "\n";
    for (std::size_t i = 0; i < a.recons.size(); ++i) {
        const abl::Field2D u = load_field(a.recons[i]);
        const abl::MetricReport rep = abl::evaluate(u, truth, a.block, a.cnr_threshold);
        const std::string label =
            i < a.labels.size() ? a.labels[i] : std::filesystem::path(a.recons[i]).stem().string();
        (*os) << label << "," << abl::detail::g17(rep.rmse) << "," << abl::detail::g17(rep.ssim);
        if (rep.cnr) (*os) << "," << abl::detail::g17(*rep.cnr);
        (*os) << "\n";
    }
    if (os == &out && !out.flush()) throw abl::io_error("write failed for '" + a.out + "'");
    return 0;
}

struct LineoutArgs {
    std::string input;
    std::string axis = "row";
    std::optional<std::size_t> index;
    std::optional<double> coord;
    std::string out;
};

int cmd_lineout(const LineoutArgs& a) {
    const abl::Field2D f = load_field(a.input);
    const bool along_row = a.axis == "row";
    const std::size_t limit = along_row ? f.rows : f.cols;
    std::size_t idx = 0;
    if (a.index) {
        idx = *a.index;
    } else if (a.coord) {
        const double origin = along_row ? f.origin_row : f.origin_col;
        const double spacing = along_row ? f.spacing_row : f.spacing_col;
        const double pos = std::floor((*a.coord - origin) / spacing);
        if (pos < 0.0 || pos >= static_cast<double>(limit))
            throw abl::shape_error("lineout: coordinate outside the grid");
        idx = static_cast<std::size_t>(pos);
    } else {
        throw abl::parse_error("lineout: give --index or --coord");
    }
    if (idx >= limit) throw abl::shape_error("lineout: index out of range");

    std::vector<std::vector<double>> rows;
    if (along_row) {
        for (std::size_t j = 0; j < f.cols; ++j) rows.push_back({f.col_center(j), f(idx, j)});
    } else {
        for (std::size_t i = 0; i < f.rows; ++i) rows.push_back({f.row_center(i), f(i, idx)});
    }
    abl::write_csv(a.out, {"coordinate", "value"}, rows);
    std::printf("lineout: %s %zu of %s -> %s (%zu samples)\n", a.axis.c_str(), idx, a.input.c_str(), a.out.c_str(),
                rows.size());
    return 0;
}

struct SinogramArgs {
    std::string input;
    std::string out;
    double dtheta = 0.25;
    std::optional<std::size_t> row;
};

int cmd_export_sinogram(const SinogramArgs& a) {
    const abl::Field2D d = load_field(a.input);
    abl::export_sinogram(d, a.dtheta, a.out, a.row);
    const auto n_angles = static_cast<std::size_t>(std::llround(180.0 / a.dtheta));
    std::printf("export-sinogram: %zu angle(s) x %zu col(s), %zu slice(s) -> %s\n", n_angles, d.cols,
                a.row ? std::size_t{1} : d.rows, a.out.c_str());
    return 0;
}

struct InfoArgs {
    std::string input;
    std::string csv_dump;
};

int cmd_info(const InfoArgs& a) {
    std::ifstream probe(a.input, std::ios::binary);
    if (!probe) throw abl::io_error("cannot open '" + a.input + "'");
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    const std::string tag(magic, 4);
    if (tag == "ABLG") {
        const abl::Field2D f = load_field(a.input);
        double lo = f.values[0], hi = f.values[0], sum = 0.0;
        for (double v : f.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        std::printf("field %zux%zu spacing %g x %g origin (%g, %g)\n", f.rows, f.cols, f.spacing_row, f.spacing_col,
                    f.origin_row, f.origin_col);
        std::printf("min %g max %g mean %g\n", lo, hi, sum / static_cast<double>(f.values.size()));
        if (!a.csv_dump.empty()) abl::write_field_csv(f, a.csv_dump);
    } else if (tag == "ABLA") {
        const abl::OperatorFile of = abl::read_abla(a.input);
        std::printf("operator %zux%zu nnz %zu, %s beam, z_source %g z_detector %g pitch %g\n", of.op.n_rows(),
                    of.op.n_cols(), of.op.nnz(), of.geometry.mode == abl::BeamMode::ConeBeam ? "cone" : "parallel",
                    of.geometry.z_source, of.geometry.z_detector, of.geometry.detector_pitch);
        std::printf("recon %zux%zu, detector %zux%zu\n", of.op.recon.rows, of.op.recon.cols, of.op.detector.rows,
                    of.op.detector.cols);
    } else {
        throw abl::io_error("unrecognized file type (magic '" + tag + "')");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-view axially-symmetric density reconstruction"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file");
    app.set_version_flag("--version", "ablrecon 0.1.0");

    PhantomArgs pa;
    auto* phantom = app.add_subcommand("phantom", "Render an analytic phantom and its exact projection");
    phantom->add_option("--spec", pa.spec_path, "Phantom spec file")->required();
    phantom->add_option("--out", pa.out_prefix, "Output path prefix")->required();
    phantom->add_option("--rows", pa.rows, "Grid rows (y samples)")->capture_default_str();
    phantom->add_option("--cols", pa.cols, "Grid cols (radial samples)")->capture_default_str();
    phantom->add_option("--ymin", pa.ymin, "Lower y extent, cm")->capture_default_str();
    phantom->add_option("--ymax", pa.ymax, "Upper y extent, cm")->capture_default_str();
    phantom->add_option("--rmax", pa.rmax, "Radial extent, cm")->capture_default_str();
    phantom->add_option("--noise", pa.noise, "Noise level as a fraction of max |projection|")->capture_default_str();
    phantom->add_option("--seed", pa.seed, "Noise RNG seed")->capture_default_str();
    phantom->add_flag("--csv", pa.csv, "Also write CSV matrices");

    ProjectArgs pra;
    auto* project = app.add_subcommand("project", "Apply the discrete projection operator to a field");
    project->add_option("--input", pra.input, "Reconstruction-grid ABLG field")->required();
    project->add_option("--out", pra.out_prefix, "Output path prefix")->required();
    project->add_flag("--half-detector", pra.half, "Detector covers x >= 0 only");
    project->add_flag("--csv", pra.csv, "Also write CSV matrices");
    pra.geo.attach(project);

    ReconstructArgs ra;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a density field from one projection");
    rec->add_option("--input", ra.input, "Projection ABLG field")->required();
    rec->add_option("--out", ra.out_prefix, "Output path prefix")->required();
    rec->add_option("--method", ra.method, "Solver: l1l2 (gradient-ratio) or tv")
        ->check(CLI::IsMember({"l1l2", "tv"}))
        ->capture_default_str();
    rec->add_option_function<double>("--lambda", [&ra](const double& v) { ra.lambda = v; },
                                     "Data weight (default: 0.99 / ||A^T A||)");
    rec->add_option_function<double>("--rho1", [&ra](const double& v) { ra.rho1 = v; },
                                     "First penalty weight (default scales with pitch^2)");
    rec->add_option_function<double>("--rho2", [&ra](const double& v) { ra.rho2 = v; },
                                     "Second penalty weight (default: pitch^2 scaling for l1l2, 1 for tv)");
    rec->add_option("--rho3", ra.params.rho3, "Box-splitting weight (l1l2 only)")->capture_default_str();
    rec->add_option("--eps", ra.params.eps, "Relative-change stopping tolerance")->capture_default_str();
    rec->add_option("--kmax", ra.params.k_max, "Outer iteration cap (l1l2)")->capture_default_str();
    rec->add_option_function<std::size_t>("--jmax", [&ra](const std::size_t& v) { ra.jmax = v; },
                                          "Inner cap (l1l2, default 5) or loop cap (tv, default 150)");
    rec->add_option("--alpha", ra.params.alpha, "Lower reconstruction bound")->capture_default_str();
    rec->add_option("--beta", ra.params.beta, "Upper reconstruction bound")->capture_default_str();
    rec->add_option("--cg-tol", ra.params.cg_tol, "Inner CG relative tolerance")->capture_default_str();
    rec->add_option("--cg-max-iter", ra.params.cg_max_iter, "Inner CG iteration cap")->capture_default_str();
    rec->add_option("--seed", ra.params.seed, "Solver RNG seed")->capture_default_str();
    rec->add_flag("--csv", ra.csv, "Also write CSV matrices");
    ra.geo.attach(rec);

    EvaluateArgs ea;
    auto* eval = app.add_subcommand("evaluate", "Score reconstructions against a ground-truth field");
    eval->add_option("--truth", ea.truth, "Ground-truth ABLG field")->required();
    eval->add_option("--recon", ea.recons, "Reconstruction ABLG field(s)")->required()->expected(-1);
    eval->add_option("--labels", ea.labels, "Row labels (default: file stems)");
    eval->add_option("--out", ea.out, "Output CSV (default: stdout)");
    eval->add_option("--block", ea.block, "SSIM tile size")->capture_default_str();
    eval->add_option_function<double>("--cnr-threshold", [&ea](const double& v) { ea.cnr_threshold = v; },
                                      "Also report CNR split at this value");

    LineoutArgs la;
    auto* line = app.add_subcommand("lineout", "Extract one row or column as CSV");
    line->add_option("--input", la.input, "ABLG field")->required();
    line->add_option("--out", la.out, "Output CSV")->required();
    line->add_option("--axis", la.axis, "row (vary along x/r) or col (vary along y)")
        ->check(CLI::IsMember({"row", "col"}))
        ->capture_default_str();
    line->add_option_function<std::size_t>("--index", [&la](const std::size_t& v) { la.index = v; }, "Zero-based index");
    line->add_option_function<double>("--coord", [&la](const double& v) { la.coord = v; },
                                      "Physical coordinate selecting the row/column");

    SinogramArgs sa;
    auto* sino = app.add_subcommand("export-sinogram", "Replicate one view over a uniform half-circle");
    sino->add_option("--input", sa.input, "Projection ABLG field")->required();
    sino->add_option("--out", sa.out, "Output ABLS file")->required();
    sino->add_option("--dtheta", sa.dtheta, "Angular step in degrees; must divide 180")->capture_default_str();
    sino->add_option_function<std::size_t>("--row", [&sa](const std::size_t& v) { sa.row = v; },
                                           "Export a single detector row (default: all)");

    InfoArgs ia;
    auto* info = app.add_subcommand("info", "Describe an ABLG/ABLA file");
    info->add_option("--input", ia.input, "File to inspect")->required();
    info->add_option("--csv", ia.csv_dump, "Dump a field to this CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (phantom->parsed()) return cmd_phantom(pa);
        if (project->parsed()) return cmd_project(pra);
        if (rec->parsed()) return cmd_reconstruct(ra);
        if (eval->parsed()) return cmd_evaluate(ea);
        if (line->parsed()) return cmd_lineout(la);
        if (sino->parsed()) return cmd_export_sinogram(sa);
        if (info->parsed()) return cmd_info(ia);
    } catch (const abl::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const abl::io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const abl::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
