// pfrontctl: front-speed studies for periodic reaction-diffusion media.
// Subcommands: eigen, speed, scan, approx, validate, profile.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pfront/config.hpp"
#include "pfront/io.hpp"
#include "pfront/util.hpp"

namespace fs = std::filesystem;
using namespace pfront;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir = "out";
    unsigned threads = 1;
};

struct Ctx {
    nlohmann::json config;
    PeriodicMedium medium;
    Nonlinearity nl;
    RunManifest manifest;
    fs::path out;
};

Ctx make_ctx(const Common& c) {
    Ctx ctx{load_config_file(c.config_path),
            PeriodicMedium{},
            Nonlinearity{},
            RunManifest{},
            fs::path(c.out_dir)};
    ctx.medium = parse_medium(require_root(ctx.config, "medium"), "medium");
    ctx.nl = parse_nonlinearity(require_root(ctx.config, "nonlinearity"), ctx.medium.cell,
                                "nonlinearity");
    ctx.manifest.tool_version = kToolVersion;
    ctx.manifest.config_json = ctx.config.dump(2);
    ctx.manifest.started_at = iso8601_utc_now();
    ctx.manifest.input_hashes["config"] = hex64(file_fnv1a(c.config_path));
    ctx.manifest.input_hashes["medium"] = hex64(ctx.medium.hash());
    fs::create_directories(ctx.out);
    return ctx;
}

void emit(Ctx& ctx, const std::string& name, const std::string& content) {
    std::string path = (ctx.out / name).string();
    write_text_file(path, content);
    ctx.manifest.add_output(path);
}

void finish(Ctx& ctx) {
    ctx.manifest.finished_at = iso8601_utc_now();
    write_manifest((ctx.out / "manifest.json").string(), ctx.manifest);
}

int cmd_eigen(const Common& c) {
    Ctx ctx = make_ctx(c);
    EigenBlock eb = parse_eigen_block(ctx.config);
    std::vector<Direction> dirs = parse_directions(ctx.config, ctx.medium.cell.dim);
    std::vector<EigenRow> rows(dirs.size());
    std::vector<std::string> errs(dirs.size());
    parallel_for(dirs.size(), c.threads, [&](std::size_t k) {
        try {
            LinearSpeed ls = linear_speed(ctx.medium, ctx.nl, dirs[k], eb.resolution,
                                          eb.lambda_lo, eb.lambda_hi);
            rows[k] = {std::atan2(dirs[k].dim > 1 ? dirs[k][1] : 0.0, dirs[k][0]), ls.lambda_min,
                       ls.c_lin, ls.residual};
        } catch (const std::exception& ex) {
            errs[k] = ex.what();
        }
    });
    for (const auto& e : errs)
        if (!e.empty()) throw numeric_error("eigen: " + e);
    emit(ctx, "eigen.csv", eigen_csv(rows));
    finish(ctx);
    std::cout << "eigen: " << rows.size() << " directions -> " << (ctx.out / "eigen.csv").string()
              << "\n";
    return 0;
}

int cmd_speed(const Common& c) {
    Ctx ctx = make_ctx(c);
    SpeedRunConfig rc = parse_run_block(ctx.config);
    std::vector<Direction> dirs = parse_directions(ctx.config, ctx.medium.cell.dim);
    std::vector<std::vector<std::string>> rows;
    FrontTrace first_trace;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        MeasuredSpeed ms = measure_speed(ctx.medium, ctx.nl, dirs[k], rc);
        if (k == 0) first_trace = ms.trace;
        rows.push_back({fmt_g17(std::atan2(dirs[k].dim > 1 ? dirs[k][1] : 0.0, dirs[k][0])),
                        fmt_g17(ms.c), "sim_direct", fmt_g17(ms.trace.uncertainty),
                        ms.reduced ? "reduced" : "full"});
    }
    emit(ctx, "speed.csv",
         csv_table({"angle", "c", "method", "uncertainty", "flags"}, rows));
    emit(ctx, "trace.csv", trace_csv(first_trace));
    emit(ctx, "trace.svg",
         line_svg(first_trace.times, first_trace.positions, "t", "front position",
                  "front position vs time"));
    finish(ctx);
    std::cout << "speed: " << rows.size() << " directions -> " << (ctx.out / "speed.csv").string()
              << "\n";
    return 0;
}

int cmd_scan(const Common& c) {
    Ctx ctx = make_ctx(c);
    ScanBlock sb = parse_scan_block(ctx.config);
    ScanConfig sc;
    sc.eigen_resolution = parse_eigen_block(ctx.config).resolution;
    sc.sim = parse_run_block(ctx.config);
    sc.eps = sb.eps;
    sc.threads = c.threads;
    SpeedCurve curve = scan_directions(ctx.medium, ctx.nl, sb.method, sb.n_samples, sc);
    emit(ctx, "scan.csv", curve_csv(curve));
    emit(ctx, "scan.svg", polar_svg(curve));
    finish(ctx);
    std::cout << "scan: " << curve.n_ok() << "/" << curve.entries.size()
              << " directions ok, kappa=" << curve.kappa() << " K=" << curve.K_sup() << "\n";
    if (!curve.complete()) {
        for (const auto& e : curve.entries)
            if (!e.ok) std::cerr << "scan: angle " << e.angle << " failed: " << e.error << "\n";
        throw numeric_error("scan: one or more directions failed");
    }
    return 0;
}

int cmd_approx(const Common& c) {
    Ctx ctx = make_ctx(c);
    ApproxBlock ab = parse_approx_block(ctx.config);
    ApproxConfig ac;
    ac.sim = parse_run_block(ctx.config);
    ac.eigen_resolution = parse_eigen_block(ctx.config).resolution;
    ac.threads = c.threads;
    std::vector<Direction> n_set = direction_sample(ctx.medium.cell.dim, ab.n_samples);
    ApproxTable tab = ignition_approx_study(ctx.medium, ctx.nl, n_set, ab.eps_list, ac);
    emit(ctx, "approx.csv", approx_csv(tab));
    emit(ctx, "approx_summary.csv", approx_summary_csv(tab));
    finish(ctx);
    std::cout << "approx: " << tab.monotonicity_violations << " monotonicity violations, gaps";
    for (double g : tab.sup_gap) std::cout << " " << g;
    std::cout << (tab.gap_decreasing ? " (decreasing)" : " (NOT decreasing)") << "\n";
    return 0;
}

int cmd_validate(const Common& c) {
    Ctx ctx = make_ctx(c);
    SpreadingBlock sp = parse_spreading_block(ctx.config);
    SupersolutionBlock ss = parse_supersolution_block(ctx.config);
    if (!sp.present && !ss.present)
        throw config_error("config: validate needs a spreading or supersolution block");

    if (sp.present) {
        sp.params.threads = c.threads;
        std::vector<Direction> dirs = direction_sample(ctx.medium.cell.dim, sp.n_samples);
        std::vector<double> refs = sp.c_ref;
        if (refs.empty()) {
            refs.resize(dirs.size());
            auto res = parse_eigen_block(ctx.config).resolution;
            if (ctx.nl.kind == NlKind::kpp_monostable) {
                parallel_for(dirs.size(), c.threads, [&](std::size_t k) {
                    refs[k] = linear_speed(ctx.medium, ctx.nl, dirs[k], res).c_lin;
                });
            } else {
                SpeedRunConfig rc = parse_run_block(ctx.config);
                for (std::size_t k = 0; k < dirs.size(); ++k)
                    refs[k] = measure_speed(ctx.medium, ctx.nl, dirs[k], rc).c;
            }
        } else if (refs.size() != dirs.size()) {
            throw config_error("config: spreading.c_ref length must match n_samples");
        }
        SpreadingReport rep = uniform_spreading_check(ctx.medium, ctx.nl, dirs, refs, sp.params);
        emit(ctx, "spreading.json", spreading_json(rep));
        std::cout << "spreading: ratio " << rep.ratio << " (gate " << rep.ratio_gate << "), "
                  << (rep.pass ? "pass" : "FAIL") << "\n";
    }
    if (ss.present) {
        if (ctx.nl.kind != NlKind::ignition)
            throw config_error("config: supersolution checks need an ignition nonlinearity");
        double lambda = ss.lambda > 0.0 ? ss.lambda : choose_lambda(ctx.medium, ctx.nl);
        int dim = ctx.medium.cell.dim;
        std::vector<Direction> dirs = direction_sample(dim, std::size_t(ss.n_samples));
        std::array<double, 2> span{ss.grid_hi[0] - ss.grid_lo[0], ss.grid_hi[1] - ss.grid_lo[1]};
        std::array<std::size_t, 2> nn{std::size_t(std::ceil(span[0] / ss.grid_h)) + 1,
                                      dim > 1 ? std::size_t(std::ceil(span[1] / ss.grid_h)) + 1
                                              : 1};
        GridSpec grid(dim, ss.grid_lo,
                      {double(nn[0] - 1) * ss.grid_h,
                       dim > 1 ? double(nn[1] - 1) * ss.grid_h : 1.0},
                      nn, {Bc::noflux, Bc::noflux});
        double worst = std::numeric_limits<double>::infinity();
        SupersolutionReport worst_rep;
        for (const auto& n : dirs) {
            SupersolutionSpec spec = make_supersolution_spec(ctx.medium, ctx.nl, n, lambda);
            SupersolutionReport rep = check_supersolution(spec, grid, ss.window);
            if (rep.min_residual < worst) {
                worst = rep.min_residual;
                worst_rep = rep;
            }
        }
        emit(ctx, "supersolution_residuals.csv", residual_csv(worst_rep));
        nlohmann::json j;
        j["lambda"] = lambda;
        j["directions"] = dirs.size();
        j["min_residual"] = worst;
        j["pass"] = worst_rep.pass;
        emit(ctx, "supersolution.json", j.dump(2) + "\n");
        std::cout << "supersolution: lambda " << lambda << ", min residual " << worst << ", "
                  << (worst_rep.pass ? "pass" : "FAIL") << "\n";
    }
    finish(ctx);
    return 0;
}

int cmd_profile(const Common& c) {
    Ctx ctx = make_ctx(c);
    SpeedRunConfig rc = parse_run_block(ctx.config);
    ProfileBlock pb = parse_profile_block(ctx.config);
    rc.snapshot_dt = pb.snapshot_dt;
    std::vector<Direction> dirs = parse_directions(ctx.config, ctx.medium.cell.dim);
    MeasuredSpeed ms = measure_speed(ctx.medium, ctx.nl, dirs.front(), rc);
    WaveProfile prof = extract_profile(ms.snapshots, ms.grid,
                                       ms.reduced ? Direction::axis(1, 0, 1.0) : dirs.front(),
                                       ms.c, ms.run_cell, pb.transient_cut);
    emit(ctx, "profile.csv", profile_csv(prof));
    emit(ctx, "profile.svg", line_svg(prof.z, prof.U, "z", "U", "wave profile"));
    nlohmann::json j;
    j["c"] = ms.c;
    j["r_puls"] = prof.r_puls;
    j["decay_rate"] = decay_rate(prof);
    j["monotone_violation"] = prof.monotone_violation;
    emit(ctx, "profile.json", j.dump(2) + "\n");
    finish(ctx);
    std::cout << "profile: c=" << ms.c << " r_puls=" << prof.r_puls << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"front-speed studies in periodic reaction-diffusion media"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "JSON config file")->required();
    app.add_option("--out", common.out_dir, "output directory (default: out)");
    app.add_option("--threads", common.threads, "worker threads (default: 1)");

    auto* s_eigen = app.add_subcommand("eigen", "linearized speeds from the cell eigenproblem");
    auto* s_speed = app.add_subcommand("speed", "direct front-speed simulation");
    auto* s_scan = app.add_subcommand("scan", "direction scan -> speed curve");
    auto* s_approx = app.add_subcommand("approx", "ignition-approximation convergence study");
    auto* s_validate = app.add_subcommand("validate", "spreading / supersolution certificates");
    auto* s_profile = app.add_subcommand("profile", "moving-frame wave profile extraction");
    // global flags are accepted on either side of the subcommand
    for (auto* s : {s_eigen, s_speed, s_scan, s_approx, s_validate, s_profile}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (s_eigen->parsed()) return cmd_eigen(common);
        if (s_speed->parsed()) return cmd_speed(common);
        if (s_scan->parsed()) return cmd_scan(common);
        if (s_approx->parsed()) return cmd_approx(common);
        if (s_validate->parsed()) return cmd_validate(common);
        if (s_profile->parsed()) return cmd_profile(common);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const numeric_error& ex) {
        std::cerr << "numerical failure: " << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "failure: " << ex.what() << "\n";
        return 3;
    }
}
