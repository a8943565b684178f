#include "wavekin/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavekin/errors.hpp"

namespace wavekin {

void StepControl::validate() const {
    if (!(dt_min > 0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
        throw ConfigError("step: need 0 < dt_min <= dt_init <= dt_max");
    if (!(safety > 0 && safety <= 1)) throw ConfigError("step: safety must lie in (0,1]");
    if (!(t_end >= 0)) throw ConfigError("step: t_end must be non-negative");
    if (snapshot_stride < 1) throw ConfigError("step: snapshot_stride must be >= 1");
}

namespace {

// Positivity bound: largest dt with m_i - dt * L_i >= (1 - safety) * m_i for
// every loss-active cell. Returns the binding cell for diagnostics.
std::pair<double, int> positivity_bound(const std::vector<double>& m,
                                        const std::vector<double>& loss, double safety) {
    double bound = std::numeric_limits<double>::infinity();
    int cell = -1;
    for (size_t i = 0; i < m.size(); ++i) {
        if (loss[i] > 0 && m[i] > 0) {
            const double b = safety * m[i] / loss[i];
            if (b < bound) {
                bound = b;
                cell = static_cast<int>(i);
            }
        }
    }
    return {bound, cell};
}

bool advance(const SpectralState& s, const RateResult& r, double dt, SpectralState& out) {
    out.masses.resize(s.masses.size());
    for (size_t i = 0; i < s.masses.size(); ++i) {
        out.masses[i] = s.masses[i] + dt * r.dm[i];
        if (!(out.masses[i] >= 0)) return false;  // also rejects NaN
    }
    out.grid = s.grid;
    out.condensate_mass = s.condensate_mass + dt * r.condensate_rate;
    out.overflow_mass = s.overflow_mass + dt * r.overflow_mass_rate;
    out.overflow_energy = s.overflow_energy + dt * r.overflow_energy_rate;
    out.time = s.time + dt;
    return true;
}

StepRecord make_record(const SpectralState& next, double dt, const RateResult& rates,
                       const StepControl& ctl) {
    StepRecord rec;
    rec.t = next.time;
    rec.dt = dt;
    const Moments m = moments(next);
    rec.total_mass = m.total_mass;
    rec.grid_energy = m.grid_energy;
    rec.overflow_mass = m.overflow_mass;
    rec.overflow_energy = m.overflow_energy;
    rec.flux_c12 = rates.c12.gross_energy;
    rec.flux_c22 = rates.c22.gross_energy;
    rec.flux_c31 = rates.c31.gross_energy;
    rec.tail_energy.reserve(ctl.probe_R.size());
    for (double R : ctl.probe_R) rec.tail_energy.push_back(tail_energy(next, R));
    return rec;
}

}  // namespace

StepOutcome step(const SpectralState& s, const CollisionTables& t, const StepControl& ctl,
                 double t_remaining) {
    ctl.validate();
    const RateResult r1 = apply(s, t);
    const auto [bound, binding_cell] = positivity_bound(s.masses, r1.loss, ctl.safety);

    // dt_cap is the positivity/config cap; the horizon cap is applied after
    // it so that finishing a run with a float-dust remainder is not mistaken
    // for stiffness.
    double dt_cap = std::min(ctl.dt_init, std::min(ctl.dt_max, bound));

    while (true) {
        if (dt_cap < ctl.dt_min)
            throw StiffnessError("step: dt fell below dt_min while preserving positivity",
                                 s.time, dt_cap, binding_cell);
        const double dt = std::min(dt_cap, t_remaining);
        SpectralState next;
        if (ctl.method == StepMethod::euler) {
            if (advance(s, r1, dt, next)) {
                StepRecord rec = make_record(next, dt, r1, ctl);
                return {std::move(next), std::move(rec)};
            }
        } else {
            SpectralState stage;
            if (advance(s, r1, dt, stage)) {
                const RateResult r2 = apply(stage, t);
                RateResult avg = r1;
                for (size_t i = 0; i < avg.dm.size(); ++i)
                    avg.dm[i] = 0.5 * (r1.dm[i] + r2.dm[i]);
                avg.condensate_rate = 0.5 * (r1.condensate_rate + r2.condensate_rate);
                avg.overflow_mass_rate =
                    0.5 * (r1.overflow_mass_rate + r2.overflow_mass_rate);
                avg.overflow_energy_rate =
                    0.5 * (r1.overflow_energy_rate + r2.overflow_energy_rate);
                auto avg_ledger = [](OperatorLedger& a, const OperatorLedger& b) {
                    a.gross_mass = 0.5 * (a.gross_mass + b.gross_mass);
                    a.gross_energy = 0.5 * (a.gross_energy + b.gross_energy);
                    a.overflow_mass = 0.5 * (a.overflow_mass + b.overflow_mass);
                    a.overflow_energy = 0.5 * (a.overflow_energy + b.overflow_energy);
                    a.condensate = 0.5 * (a.condensate + b.condensate);
                };
                avg_ledger(avg.c12, r2.c12);
                avg_ledger(avg.c22, r2.c22);
                avg_ledger(avg.c31, r2.c31);
                if (advance(s, avg, dt, next)) {
                    StepRecord rec = make_record(next, dt, avg, ctl);
                    return {std::move(next), std::move(rec)};
                }
            }
        }
        dt_cap = std::min(dt_cap, dt) * 0.5;  // retry; never clip
    }
}

Trajectory run(SpectralState initial, const CollisionTables& t, const StepControl& ctl,
               std::string* stiffness_msg) {
    ctl.validate();
    Trajectory traj;
    traj.snapshot_times.push_back(initial.time);
    traj.snapshots.push_back(initial);

    SpectralState cur = std::move(initial);
    const double t_end = cur.time + ctl.t_end;
    long since_snapshot = 0;
    while (cur.time < t_end) {
        const double remaining = t_end - cur.time;
        if (!(cur.time + remaining > cur.time)) break;  // below time resolution
        StepOutcome out;
        try {
            out = step(cur, t, ctl, remaining);
        } catch (const StiffnessError& e) {
            if (!stiffness_msg) throw;
            *stiffness_msg = e.what();
            break;
        }
        cur = std::move(out.state);
        traj.series.push_back(std::move(out.record));
        if (++since_snapshot == ctl.snapshot_stride) {
            since_snapshot = 0;
            traj.snapshot_times.push_back(cur.time);
            traj.snapshots.push_back(cur);
        }
    }
    if (since_snapshot != 0 || traj.snapshots.size() == 1) {
        if (traj.snapshot_times.empty() || traj.snapshot_times.back() != cur.time) {
            traj.snapshot_times.push_back(cur.time);
            traj.snapshots.push_back(cur);
        }
    }
    return traj;
}

}  // namespace wavekin
