// wavekin: simulate and analyze the isotropic three-channel wave kinetic
// equation on a truncated frequency grid.
//
//   wavekin validate --config cfg.json
//   wavekin run      --config cfg.json [--out DIR] [--workers N] [--allow-invalid]
//   wavekin sweep    --config cfg.json [--out DIR] [--workers N]
//   wavekin analyze  RUN_DIR [--out DIR] [--upsilon N]
//
// Exit codes: 0 success, 1 failed checks / runtime failure, 2 usage or
// configuration errors, 3 missing or corrupt data files.

#include <CLI11.hpp>
#include <iostream>

#include "wavekin/errors.hpp"
#include "wavekin/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"wave kinetic equation simulator and cascade diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string run_dir;
    int workers = 1;
    bool allow_invalid = false;
    int upsilon = -1;

    auto* validate = app.add_subcommand("validate", "check kernel parameter admissibility");
    validate->add_option("--config", config_path, "config JSON")->required();

    auto* runcmd = app.add_subcommand("run", "simulate and write artifacts");
    runcmd->add_option("--config", config_path, "config JSON")->required();
    runcmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    runcmd->add_option("--workers", workers, "rate-evaluation threads");
    runcmd->add_flag("--allow-invalid", allow_invalid, "run despite failed admissibility checks");
    runcmd->add_option("--upsilon", upsilon, "override the partition level count exponent");

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    sweep->add_option("--config", config_path, "config JSON with a sweep.axes section")
        ->required();
    sweep->add_option("--out", out_dir, "sweep output directory");
    sweep->add_option("--workers", workers, "concurrent runs");
    sweep->add_flag("--allow-invalid", allow_invalid, "run despite failed admissibility checks");

    auto* analyze = app.add_subcommand("analyze", "recompute diagnostics from a run directory");
    analyze->add_option("run_dir", run_dir, "directory written by `wavekin run`")->required();
    analyze->add_option("--out", out_dir, "where to write the recomputed report");
    analyze->add_option("--workers", workers, "rate-evaluation threads");
    analyze->add_option("--upsilon", upsilon, "override the partition level count exponent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    wavekin::RunOptions opt;
    opt.workers = workers;
    opt.allow_invalid = allow_invalid;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (upsilon >= 0) opt.upsilon_override = upsilon;

    try {
        if (validate->parsed())
            return wavekin::cmd_validate(wavekin::load_config_file(config_path), std::cout);
        if (runcmd->parsed())
            return wavekin::cmd_run(wavekin::load_config_file(config_path), opt, std::cout);
        if (sweep->parsed()) {
            auto cfg = wavekin::load_config_file(config_path);
            auto axes = wavekin::load_sweep_axes(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return wavekin::cmd_sweep(cfg, axes, opt, std::cout);
        }
        if (analyze->parsed()) {
            std::optional<wavekin::CascadeSpec> diag;  // reuse the run's own settings
            return wavekin::cmd_analyze(run_dir, diag, opt, std::cout);
        }
    } catch (const wavekin::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const wavekin::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
