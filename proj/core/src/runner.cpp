#include "wavekin/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wavekin/csvio.hpp"
#include "wavekin/errors.hpp"

namespace wavekin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

json constraint_to_json(const ConstraintCheck& c) {
    json j;
    j["name"] = c.name;
    j["lhs"] = c.lhs;
    j["satisfied"] = c.satisfied;
    j["slack"] = c.slack;
    return j;
}

json report_to_json(const ConstraintReport& r) {
    json j;
    j["schema"] = "wavekin-constraints-v1";
    j["c_in"] = r.c_in;
    json ineq = json::array();
    for (const auto& c : r.inequalities) ineq.push_back(constraint_to_json(c));
    j["inequalities"] = ineq;
    json pos = json::array();
    for (const auto& c : r.positivity) pos.push_back(constraint_to_json(c));
    j["positivity"] = pos;
    j["cin_threshold_immediate"] = r.cin_threshold_immediate;
    j["cin_threshold_finite"] = r.cin_threshold_finite;
    j["sigma_upper_bound"] = r.sigma_upper_bound;
    j["eps_plus_sigma_upper_bound"] = r.eps_plus_sigma_upper_bound;
    j["epsilon_upper_bound"] = r.epsilon_upper_bound;
    j["kappa2_analytic"] = r.kappa2_analytic;
    j["all_pass"] = r.all_pass();
    return j;
}

json cascade_report_to_json(const CascadeReport& r) {
    json j;
    j["schema"] = "wavekin-cascade-report-v1";
    j["tstar_tol"] = r.tstar_tol;
    if (r.tstar)
        j["tstar"] = *r.tstar;
    else
        j["tstar"] = "none within horizon";
    j["level_set_integrand"] = r.energy_weighted ? "energy" : "mass";
    j["c_o"] = r.c_o;
    j["sigma"] = r.sigma;
    j["lambda"] = r.lambda;
    j["epsilon"] = r.epsilon;
    if (r.upsilon_override)
        j["upsilon_override"] = *r.upsilon_override;
    else
        j["upsilon_override"] = nullptr;
    j["snapshot_times"] = r.snapshot_times;
    j["thresholds"]["cin_threshold_immediate"] = r.cin_threshold_immediate;
    j["thresholds"]["cin_threshold_finite"] = r.cin_threshold_finite;
    j["thresholds"]["sigma_upper_bound"] = r.sigma_upper_bound;
    j["thresholds"]["epsilon_upper_bound"] = r.epsilon_upper_bound;

    json levels = json::array();
    for (size_t li = 0; li < r.levels.size(); ++li) {
        const auto& L = r.levels[li];
        json jl;
        jl["ell"] = L.ell;
        jl["threshold_global"] = L.threshold_global;
        jl["threshold_sub"] = L.threshold_sub;
        jl["horizon"] = L.horizon;
        jl["max_snapshot_spacing"] = L.max_snapshot_spacing;
        jl["M"] = L.M;
        jl["M_i"] = L.M_i;
        jl["N"] = L.N;
        jl["P"] = L.P;
        jl["Q"] = L.Q;
        json conc = json::array();
        for (auto c : r.concentration[li])
            conc.push_back(c == Concentration::concentrated ? "concentrated" : "spread");
        jl["concentration"] = conc;
        json flux = json::array();
        for (const auto& f : r.flux_terms[li]) {
            json jf;
            jf["t12"] = f.t12;
            jf["t22"] = f.t22;
            jf["t31"] = f.t31;
            flux.push_back(jf);
        }
        jl["flux_terms"] = flux;
        levels.push_back(jl);
    }
    j["levels"] = levels;
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << text;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const std::vector<double>& probes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << "# wavekin-trajectory v1\n";
    f << "t,dt,mass,energy_grid,overflow_mass,overflow_energy,flux_c12,flux_c22,flux_c31";
    for (double R : probes) f << ",tail_E@" << fmt_g17(R);
    f << "\n";
    for (const auto& r : traj.series) {
        f << fmt_g17(r.t) << ',' << fmt_g17(r.dt) << ',' << fmt_g17(r.total_mass) << ','
          << fmt_g17(r.grid_energy) << ',' << fmt_g17(r.overflow_mass) << ','
          << fmt_g17(r.overflow_energy) << ',' << fmt_g17(r.flux_c12) << ','
          << fmt_g17(r.flux_c22) << ',' << fmt_g17(r.flux_c31);
        for (double te : r.tail_energy) f << ',' << fmt_g17(te);
        f << '\n';
    }
}

void write_cascade_series_csv(const fs::path& path, const CascadeReport& rep,
                              std::span<const SpectralState> snapshots) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << "# wavekin-cascade-series v1\n";
    f << "snapshot,t,ell,tail_mass,tail_energy,concentration,flux_t12,flux_t22,flux_t31\n";
    for (size_t li = 0; li < rep.level_indices.size(); ++li) {
        const int ell = rep.level_indices[li];
        const double omega = std::ldexp(1.0, ell);
        for (size_t k = 0; k < snapshots.size(); ++k) {
            const auto& s = snapshots[k];
            double tm = s.overflow_mass, te = s.overflow_energy;
            for (int i = 0; i < s.grid->size(); ++i) {
                if (s.grid->rep(i) >= omega) {
                    tm += s.masses[i];
                    te += s.masses[i] * s.grid->rep(i);
                }
            }
            const auto& fx = rep.flux_terms[li][k];
            f << k << ',' << fmt_g17(rep.snapshot_times[k]) << ',' << ell << ','
              << fmt_g17(tm) << ',' << fmt_g17(te) << ','
              << (rep.concentration[li][k] == Concentration::concentrated ? "concentrated"
                                                                          : "spread")
              << ',' << fmt_g17(fx.t12) << ',' << fmt_g17(fx.t22) << ',' << fmt_g17(fx.t31)
              << '\n';
        }
    }
}

struct RunSummary {
    int status = 0;
    bool constraints_pass = false;
    bool immediate_cascade = false;  // c_in below the immediate-cascade threshold
    std::optional<double> tstar;
    double final_overflow_energy_fraction = 0;
};

void print_constraint_table(const ConstraintReport& rep, std::ostream& out) {
    auto line = [&](const ConstraintCheck& c) {
        out << "  [" << (c.satisfied ? "pass" : "FAIL") << "] " << std::left << std::setw(44)
            << c.name << " lhs = " << fmt_g17(c.lhs) << ", slack = " << fmt_g17(c.slack)
            << "\n";
    };
    out << "exponent inequalities:\n";
    for (const auto& c : rep.inequalities) line(c);
    out << "weight positivity:\n";
    for (const auto& c : rep.positivity) line(c);
    out << "thresholds (c_in = " << fmt_g17(rep.c_in) << "):\n";
    out << "  immediate-cascade c_in threshold: " << fmt_g17(rep.cin_threshold_immediate)
        << "\n";
    out << "  finite-time-cascade c_in threshold: " << fmt_g17(rep.cin_threshold_finite)
        << "\n";
    out << "  sigma upper bound: " << fmt_g17(rep.sigma_upper_bound) << "\n";
    out << "  epsilon upper bound (at sigma bound): " << fmt_g17(rep.epsilon_upper_bound)
        << "\n";
    out << "  kappa2 configured vs analytic derivative exponent: "
        << fmt_g17(rep.kappa2_analytic) << "\n";
}

RunSummary do_run(RunConfig cfg, const RunOptions& opt, std::ostream& log) {
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    if (opt.upsilon_override) cfg.diagnostics.upsilon_override = opt.upsilon_override;

    RunSummary summary;
    const KernelModel model = cfg.model();
    double c_in_for_report = cfg.diagnostics.c_in;
    const ConstraintReport constraints = validate_constraints(model, c_in_for_report);
    summary.constraints_pass = constraints.all_pass();
    summary.immediate_cascade = c_in_for_report < constraints.cin_threshold_immediate;
    if (!summary.constraints_pass && !opt.allow_invalid) {
        log << "run: kernel parameters fail \"" << constraints.first_failure()->name
            << "\"; use --allow-invalid to run anyway\n";
        summary.status = 1;
        return summary;
    }

    const fs::path out(cfg.out_dir);
    fs::create_directories(out / "snapshots");

    GridPtr grid = cfg.grid.build();
    const CollisionTables tables =
        CollisionTables::build(grid, model, cfg.toggles, opt.allow_invalid);
    SpectralState initial = cfg.build_initial(grid);
    const Moments m0 = moments(initial);

    std::string stiff_msg;
    Trajectory traj = run(std::move(initial), tables, cfg.step, &stiff_msg);
    const bool stiff = !stiff_msg.empty();
    if (stiff) summary.status = 1;

    write_trajectory_csv(out / "trajectory.csv", traj, cfg.step.probe_R);

    {
        std::ofstream mf(out / "snapshots" / "manifest.csv", std::ios::binary);
        mf << "# wavekin-snapshot-manifest v1\n";
        mf << "index,time,file\n";
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof(name), "snap_%05zu.csv", k);
            std::ofstream sf(out / "snapshots" / name, std::ios::binary);
            write_snapshot_csv(sf, traj.snapshots[k]);
            mf << k << ',' << fmt_g17(traj.snapshot_times[k]) << ',' << name << '\n';
        }
    }

    std::vector<double> series_t, series_e;
    series_t.reserve(traj.series.size());
    for (const auto& r : traj.series) {
        series_t.push_back(r.t);
        series_e.push_back(r.grid_energy);
    }
    const CascadeReport rep =
        compute_report(traj.snapshots, traj.snapshot_times, series_t, series_e,
                       m0.total_energy, model, cfg.diagnostics);
    summary.tstar = rep.tstar;

    write_text_file(out / "report.json", cascade_report_to_json(rep).dump(2) + "\n");
    write_cascade_series_csv(out / "cascade_series.csv", rep, traj.snapshots);

    const Moments mf = moments(traj.snapshots.back());
    summary.final_overflow_energy_fraction =
        m0.total_energy > 0 ? mf.overflow_energy / m0.total_energy : 0.0;

    json manifest;
    manifest["schema"] = "wavekin-manifest-v1";
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = json::parse(config_to_json(cfg));
    manifest["constraints"] = report_to_json(constraints);
    manifest["steps"] = traj.series.size();
    manifest["snapshots"] = traj.snapshots.size();
    manifest["initial"]["mass"] = m0.total_mass;
    manifest["initial"]["grid_energy"] = m0.grid_energy;
    manifest["initial"]["total_energy"] = m0.total_energy;
    manifest["final"]["mass"] = mf.total_mass;
    manifest["final"]["grid_energy"] = mf.grid_energy;
    manifest["final"]["overflow_mass"] = mf.overflow_mass;
    manifest["final"]["overflow_energy"] = mf.overflow_energy;
    manifest["final"]["condensate_mass"] = traj.snapshots.back().condensate_mass;
    manifest["final"]["time"] = traj.snapshots.back().time;
    if (rep.tstar)
        manifest["tstar"] = *rep.tstar;
    else
        manifest["tstar"] = "none within horizon";
    if (stiff) manifest["stiffness_error"] = stiff_msg;
    write_text_file(out / "manifest.json", manifest.dump(2) + "\n");

    log << "run: " << traj.series.size() << " steps, " << traj.snapshots.size()
        << " snapshots -> " << out.string() << "\n";
    if (stiff) log << "run: stopped early: " << stiff_msg << "\n";
    return summary;
}

void set_worker_threads(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const ConstraintReport rep = validate_constraints(cfg.model(), cfg.diagnostics.c_in);
    print_constraint_table(rep, out);
    return rep.all_pass() ? 0 : 1;
}

int cmd_run(RunConfig cfg, const RunOptions& opt, std::ostream& log) {
    set_worker_threads(opt.workers);
    return do_run(std::move(cfg), opt, log).status;
}

int cmd_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
              const RunOptions& opt, std::ostream& log) {
    if (axes.empty()) throw ConfigError("sweep: no axes given");
    for (const auto& ax : axes)
        if (ax.values.empty()) throw ConfigError("sweep: axis " + ax.key + " is empty");

    size_t total = 1;
    for (const auto& ax : axes) total *= ax.values.size();

    struct Point {
        std::vector<double> values;
        RunConfig cfg;
        RunSummary summary;
        bool failed = false;
        std::string error;
    };
    std::vector<Point> points;
    points.reserve(total);
    for (size_t idx = 0; idx < total; ++idx) {
        Point p;
        p.cfg = base;
        size_t rem = idx;
        // last axis fastest
        std::vector<size_t> sel(axes.size());
        for (size_t a = axes.size(); a-- > 0;) {
            sel[a] = rem % axes[a].values.size();
            rem /= axes[a].values.size();
        }
        for (size_t a = 0; a < axes.size(); ++a) {
            const double v = axes[a].values[sel[a]];
            p.values.push_back(v);
            p.cfg = with_override(p.cfg, axes[a].key, v);
        }
        char sub[32];
        std::snprintf(sub, sizeof(sub), "run_%04zu", idx);
        p.cfg.out_dir = (fs::path(base.out_dir) / sub).string();
        points.push_back(std::move(p));
    }

    const int workers = std::max(1, opt.workers);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        set_worker_threads(1);  // runs are the unit of parallelism here
        std::ostringstream sink;
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= points.size()) break;
            Point& p = points[idx];
            try {
                RunOptions ropt = opt;
                ropt.workers = 1;
                ropt.out_dir = std::nullopt;
                p.summary = do_run(p.cfg, ropt, sink);
            } catch (const std::exception& e) {
                p.failed = true;
                p.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    fs::create_directories(base.out_dir);
    std::ofstream agg(fs::path(base.out_dir) / "aggregate.csv", std::ios::binary);
    agg << "# wavekin-sweep-aggregate v1\n";
    agg << "index";
    for (const auto& ax : axes) agg << ',' << ax.key;
    agg << ",status,constraints_pass,immediate_cascade,tstar,final_overflow_energy_fraction\n";
    int failures = 0;
    for (size_t idx = 0; idx < points.size(); ++idx) {
        const Point& p = points[idx];
        agg << idx;
        for (double v : p.values) agg << ',' << fmt_g17(v);
        if (p.failed) {
            ++failures;
            agg << ",error,,,,\n";
            log << "sweep[" << idx << "]: " << p.error << "\n";
            continue;
        }
        if (p.summary.status != 0) ++failures;
        agg << ',' << p.summary.status << ',' << (p.summary.constraints_pass ? 1 : 0) << ','
            << (p.summary.immediate_cascade ? 1 : 0) << ',';
        if (p.summary.tstar)
            agg << fmt_g17(*p.summary.tstar);
        else
            agg << "none";
        agg << ',' << fmt_g17(p.summary.final_overflow_energy_fraction) << '\n';
    }
    log << "sweep: " << points.size() << " runs, " << failures << " failures\n";
    return failures == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& run_dir, std::optional<CascadeSpec> diag,
                const RunOptions& opt, std::ostream& log) {
    set_worker_threads(opt.workers);
    const fs::path dir(run_dir);
    if (!fs::exists(dir / "manifest.json"))
        throw DataError("analyze: no manifest.json in " + run_dir);

    RunConfig cfg;
    {
        std::ifstream mf(dir / "manifest.json");
        json manifest;
        try {
            manifest = json::parse(mf);
        } catch (const json::parse_error& e) {
            throw DataError(std::string("analyze: corrupt manifest: ") + e.what());
        }
        cfg = parse_config(manifest.at("config").dump());
    }
    CascadeSpec spec = diag ? *diag : cfg.diagnostics;
    if (opt.upsilon_override) spec.upsilon_override = opt.upsilon_override;

    // snapshots
    std::vector<SpectralState> snapshots;
    std::vector<double> snapshot_times;
    {
        std::ifstream mf(dir / "snapshots" / "manifest.csv");
        if (!mf) throw DataError("analyze: missing snapshots/manifest.csv");
        std::string line;
        std::getline(mf, line);  // schema
        std::getline(mf, line);  // header
        while (std::getline(mf, line)) {
            if (line.empty()) continue;
            const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw DataError("analyze: malformed snapshot manifest row: " + line);
            const double t = std::strtod(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr);
            const std::string file = line.substr(c2 + 1);
            std::ifstream sf(dir / "snapshots" / file);
            if (!sf) throw DataError("analyze: missing snapshot file " + file);
            snapshots.push_back(read_snapshot_csv(sf));
            snapshot_times.push_back(t);
        }
    }
    if (snapshots.empty()) throw DataError("analyze: no snapshots in " + run_dir);

    // series
    std::vector<double> series_t, series_e;
    {
        std::ifstream tf(dir / "trajectory.csv");
        if (!tf) throw DataError("analyze: missing trajectory.csv");
        std::string line;
        std::getline(tf, line);
        std::getline(tf, line);  // column header
        while (std::getline(tf, line)) {
            if (line.empty()) continue;
            double t, dt, mass, energy;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &dt, &mass, &energy) != 4)
                throw DataError("analyze: malformed trajectory row: " + line);
            series_t.push_back(t);
            series_e.push_back(energy);
        }
    }

    const KernelModel model = cfg.model();
    const double e0 = moments(snapshots.front()).total_energy;
    const CascadeReport rep = compute_report(snapshots, snapshot_times, series_t, series_e,
                                             e0, model, spec);

    const fs::path out = opt.out_dir ? fs::path(*opt.out_dir) : dir / "analysis";
    fs::create_directories(out);
    write_text_file(out / "report.json", cascade_report_to_json(rep).dump(2) + "\n");
    write_cascade_series_csv(out / "cascade_series.csv", rep, snapshots);
    log << "analyze: " << snapshots.size() << " snapshots -> " << out.string() << "\n";
    return 0;
}

}  // namespace wavekin
