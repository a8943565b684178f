#pragma once

#include <vector>

#include "wavekin/collision.hpp"
#include "wavekin/spectrum.hpp"

namespace wavekin {

enum class StepMethod { euler, heun };

/// Explicit positivity-preserving step control. The step size is
/// min(dt_init, safety * min_i m_i / L_i) over loss-active cells; a step that
/// would still drive a mass negative halves dt and retries, and dt < dt_min
/// raises StiffnessError. No clipping anywhere.
struct StepControl {
    StepMethod method = StepMethod::euler;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 1e-3;
    double safety = 0.9;  // fraction of the positivity bound, in (0, 1]
    double t_end = 1.0;
    int snapshot_stride = 1;         // steps between stored snapshots
    std::vector<double> probe_R;     // tail-energy probes recorded per step

    void validate() const;  // throws ConfigError
};

struct StepRecord {
    double t = 0;   // time after the step
    double dt = 0;
    double total_mass = 0;  // grid + condensate + overflow
    double grid_energy = 0;
    double overflow_mass = 0;
    double overflow_energy = 0;
    double flux_c12 = 0;  // per-operator gross energy flux during the step
    double flux_c22 = 0;
    double flux_c31 = 0;
    std::vector<double> tail_energy;  // one entry per probe_R
};

struct StepOutcome {
    SpectralState state;
    StepRecord record;
};

/// One guarded step. `t_remaining` additionally caps dt (pass infinity to
/// disable). Zero rates advance by dt_init unchanged.
StepOutcome step(const SpectralState& s, const CollisionTables& t, const StepControl& ctl,
                 double t_remaining);

struct Trajectory {
    std::vector<SpectralState> snapshots;  // always includes initial and final states
    std::vector<double> snapshot_times;
    std::vector<StepRecord> series;        // one record per accepted step

    const SpectralState& initial() const { return snapshots.front(); }
    const SpectralState& final_state() const { return snapshots.back(); }
};

/// Integrate to t_end. Snapshots are stored every snapshot_stride steps plus
/// the initial and final states. A stiffness failure throws StiffnessError,
/// unless `stiffness_msg` is non-null, in which case the message is stored
/// there and the partial trajectory is returned.
Trajectory run(SpectralState initial, const CollisionTables& t, const StepControl& ctl,
               std::string* stiffness_msg = nullptr);

}  // namespace wavekin
