#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "darcywave/continuation.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/io.hpp"
#include "darcywave/reconstruct.hpp"

namespace darcywave::cli {

/// Exit statuses of the command-line tool.
enum Status : int { ok = 0, failure = 1, usage = 2, uncertified = 3 };

/// Vertical extent of the certification box, in units of h.
inline constexpr double kCertifyHeight = 2.0;

inline EllipticityReport certify(const RunConfig& rc) {
    return ellipticity_certify(rc.forcing, rc.params, 0.0, kCertifyHeight * rc.params.h);
}

inline std::string describe(const EllipticityReport& r) {
    std::ostringstream o;
    o << (r.mode == EllipticityMode::gravity ? "gravity" : "speed") << " mode, margin " << r.margin << " on z in ["
      << r.z_min << ", " << r.z_max << "]" << (r.certified ? "" : " (not certified)");
    return o.str();
}

/// continue --config <file> --out <dir>
inline int cmd_continue(const fs::path& config_path, const fs::path& out_arg, bool allow_uncertified, std::ostream& log,
                        std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_run_config(config_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    const fs::path out = out_arg.empty() ? fs::path(rc.output_dir) : out_arg;
    if (out.empty()) {
        err << "error: no output directory (use --out or output_dir)\n";
        return usage;
    }
    const auto cert = certify(rc);
    log << "ellipticity: " << describe(cert) << '\n';
    if (!cert.certified && !(allow_uncertified || rc.allow_uncertified)) {
        err << "error: ellipticity conditions not certified; rerun with --allow-uncertified to override\n";
        return uncertified;
    }

    fs::create_directories(out / "psi");
    write_text(out / "config.json", to_json(rc).dump(2) + "\n");
    std::ofstream branch_file(out / "branch.jsonl", std::ios::binary);
    if (!branch_file) {
        err << "error: cannot write to '" << out.string() << "'\n";
        return failure;
    }
    std::size_t index = 0;
    const auto observer = [&](const BranchPoint& p) {
        save_spectral(out / point_file_name(index), p.psi);
        branch_file << point_record(index, p).dump() << '\n';
        branch_file.flush();
        log << "point " << index << "  upkappa " << std::setprecision(8) << p.upkappa << "  residual " << std::setprecision(3)
            << p.monitors.residual << "  distortion " << p.monitors.distortion << "  newton " << p.newton_iterations << '\n';
        ++index;
    };
    Branch branch;
    try {
        branch = continue_branch(rc.forcing, rc.params, rc.continuation, observer);
    } catch (const Error& e) {
        branch.reason = Termination::newton_failure;
        branch.detail = e.what();
        branch_file << termination_record(branch).dump() << '\n';
        write_text(out / "summary.json", summary_record(branch).dump(2) + "\n");
        err << "error: " << e.what() << '\n';
        return failure;
    }
    branch_file << termination_record(branch).dump() << '\n';
    write_text(out / "summary.json", summary_record(branch).dump(2) + "\n");
    log << "terminated: " << to_string(branch.reason);
    if (!branch.tripped.empty()) log << " (" << branch.tripped << ")";
    log << ", fastest growing monitor: " << branch.fastest_growing << ", points: " << branch.points.size() << '\n';
    return ok;
}

struct VerifyOptions {
    bool refine = false;
    double tolerance = 1e-6;
    std::string export_path;  ///< optional solution dump
};

inline void print_report(std::ostream& os, const ResidualReport& r, const std::string& prefix = "") {
    os << std::scientific << std::setprecision(3);
    for (const auto& [name, v] : r.entries()) os << prefix << std::left << std::setw(12) << name << ' ' << v << '\n';
    os << prefix << std::left << std::setw(12) << "min_jacobian" << ' ' << r.min_jacobian << '\n';
    os << std::defaultfloat;
}

/// verify <dir> --point <k> [--refine]
inline int cmd_verify(const fs::path& dir, long point, const VerifyOptions& opt, std::ostream& log, std::ostream& err) {
    LoadedBranch lb;
    SpectralField psi;
    double upkappa = 0.0;
    try {
        lb = load_branch(dir);
        if (point < 0 || static_cast<std::size_t>(point) >= lb.records.size()) {
            err << "error: branch has no point " << point << " (" << lb.records.size() << " points)\n";
            return usage;
        }
        const auto& rec = lb.records[static_cast<std::size_t>(point)];
        upkappa = rec.at("upkappa").get<double>();
        psi = load_spectral(dir / rec.at("psi").get<std::string>());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    const auto& rc = lb.config;
    const StripGrid sg{rc.continuation.n, rc.continuation.m_z, rc.params.h};
    if (psi.size() != sg.n) {
        err << "error: psi dump has N = " << psi.size() << ", config says " << sg.n << '\n';
        return usage;
    }
    ResidualReport rep;
    try {
        const auto flat = solve_flat_pressure(upkappa, psi, rc.forcing, rc.params, sg);
        const auto sol = reconstruct_fields(upkappa, psi, flat, rc.forcing, rc.params);
        rep = verify_traveling_system(sol, upkappa, psi, rc.forcing, rc.params);
        if (!opt.export_path.empty()) {
            write_solution(opt.export_path, sol);
            write_text(opt.export_path + ".surface.txt", surface_table(sol));
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    log << "point " << point << "  upkappa " << std::setprecision(17) << upkappa << '\n';
    print_report(log, rep);
    bool pass = rep.max() <= opt.tolerance;

    if (opt.refine) {
        const WaveOperator op2(rc.forcing, rc.params, 2 * sg.n, 2 * sg.m_z);
        try {
            auto cfg2 = rc.continuation;
            cfg2.n = 2 * sg.n;
            cfg2.m_z = 2 * sg.m_z;
            const auto [psi2, nrep] = newton_solve(op2, upkappa, psi.resized(2 * sg.n), cfg2);
            const StripGrid sg2{2 * sg.n, 2 * sg.m_z, rc.params.h};
            const auto rep2 = verify_point(upkappa, psi2, rc.forcing, rc.params, sg2);
            const double drift = (psi2 - psi.resized(2 * sg.n)).l2_norm();
            const double d1 = distortion(psi, rc.params.h), d2 = distortion(psi2, rc.params.h);
            log << "refined to N = " << sg2.n << ", M_z = " << sg2.m_z << " (" << nrep.iterations << " Newton iterations)\n";
            print_report(log, rep2, "  2N ");
            log << std::scientific << std::setprecision(3) << "drift_psi    " << drift << '\n'
                << "drift_distortion " << std::abs(d2 - d1) / d1 << '\n'
                << std::defaultfloat;
            pass = pass && rep2.max() <= opt.tolerance;
        } catch (const Error& e) {
            err << "error: refinement failed: " << e.what() << '\n';
            return failure;
        }
    }
    log << (pass ? "PASS" : "FAIL") << " (tolerance " << opt.tolerance << ")\n";
    return pass ? ok : failure;
}

/// monitors <dir>: re-emits the monitor table of a stored branch.
inline int cmd_monitors(const fs::path& dir, std::ostream& log, std::ostream& err) {
    LoadedBranch lb;
    try {
        lb = load_branch(dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    log << "# index upkappa arclength sobolev holder distortion min_jacobian graphical residual\n";
    log << std::setprecision(10);
    for (const auto& r : lb.records) {
        const auto m = monitors_from_json(r.at("monitors"));
        log << r.at("index").get<long>() << ' ' << r.at("upkappa").get<double>() << ' ' << r.at("arclength").get<double>() << ' '
            << m.sobolev << ' ' << m.holder << ' ' << m.distortion << ' ' << m.min_jacobian << ' ' << (m.graphical ? 1 : 0) << ' '
            << m.residual << '\n';
    }
    if (!lb.termination.is_null()) log << "# termination " << lb.termination.dump() << '\n';
    return ok;
}

}  // namespace darcywave::cli
