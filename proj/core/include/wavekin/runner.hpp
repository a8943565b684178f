#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "wavekin/config.hpp"

namespace wavekin {

struct RunOptions {
    int workers = 1;
    bool allow_invalid = false;
    std::optional<int> upsilon_override;  // CLI-level override of the diagnostics
    std::optional<std::string> out_dir;   // CLI-level override of output.dir
};

/// Print the admissibility table and cascade thresholds. Returns 0 when every
/// check passes, 1 otherwise.
int cmd_validate(const RunConfig& cfg, std::ostream& out);

/// Validate, build, integrate, and write the full artifact set
/// (manifest.json, trajectory.csv, snapshots/, report.json,
/// cascade_series.csv) under the output directory. On a stiffness failure the
/// partial series is flushed and a nonzero status returned.
int cmd_run(RunConfig cfg, const RunOptions& opt, std::ostream& log);

/// Cartesian sweep over the config's sweep.axes; one run directory per grid
/// point plus aggregate.csv. Individual failures are recorded and the sweep
/// continues.
int cmd_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
              const RunOptions& opt, std::ostream& log);

/// Recompute the cascade report from a run directory's stored snapshots and
/// series, without re-simulating. Diagnostics fields may be overridden via
/// `diag`; pass nullopt to reuse the run's own settings.
int cmd_analyze(const std::string& run_dir, std::optional<CascadeSpec> diag,
                const RunOptions& opt, std::ostream& log);

}  // namespace wavekin
