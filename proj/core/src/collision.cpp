#include "wavekin/collision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavekin/errors.hpp"

namespace wavekin {

namespace {
using Zone = BinSplit::Zone;
}

CollisionTables CollisionTables::build(GridPtr grid, KernelModel model, OperatorToggles toggles,
                                       bool allow_invalid) {
    if (!allow_invalid) {
        model.validate_ranges();
        const auto report = validate_constraints(model, 0.0);
        if (!report.all_pass()) {
            std::ostringstream msg;
            msg << "collision tables: kernel model fails admissibility check \""
                << report.first_failure()->name << "\" (lhs = " << report.first_failure()->lhs
                << "); pass allow_invalid to override";
            throw ConfigError(msg.str());
        }
    }

    CollisionTables t;
    t.grid_ = std::move(grid);
    t.model_ = std::move(model);
    t.toggles_ = toggles;

    const int n = t.grid_->size();
    t.w_.resize(n);
    t.bar_p_.resize(n);
    t.bar_q_.resize(n);
    t.bar_r_.resize(n);
    t.weight_r_.resize(n);
    t.k_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double w = t.grid_->rep(i);
        t.w_[i] = w;
        t.bar_p_[i] = t.model_.bar_p(w);
        t.bar_q_[i] = t.model_.bar_q(w);
        t.bar_r_[i] = t.model_.bar_r(w);
        t.weight_r_[i] = t.model_.weight_r(w);
        t.k_[i] = t.model_.k_of_omega(w);
        if (!std::isfinite(t.bar_p_[i]) || !std::isfinite(t.bar_q_[i]) ||
            !std::isfinite(t.bar_r_[i]) || !std::isfinite(t.weight_r_[i]) ||
            !std::isfinite(t.k_[i]) || t.k_[i] <= 0)
            throw ConfigError("collision tables: non-finite kernel factor at cell " +
                              std::to_string(i));
    }

    const size_t ntri = static_cast<size_t>(n) * (n + 1) / 2;
    t.sum_split_.resize(ntri);
    t.diff_split_.resize(ntri);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            t.sum_split_[tri(i, j)] = t.locate(t.w_[i] + t.w_[j]);
            t.diff_split_[tri(i, j)] = t.locate(t.w_[i] - t.w_[j]);
        }
    }
    return t;
}

BinSplit CollisionTables::locate(double target) const {
    const int n = static_cast<int>(w_.size());
    const double wmax = grid_->omega_max();
    if (target > wmax) return {Zone::overflow, n - 1, 0.0, target};
    if (target >= w_[n - 1]) {
        const double lam = (wmax - target) / (wmax - w_[n - 1]);
        return {Zone::above_last, n - 1, lam, target};
    }
    if (target <= w_[0]) {
        const double lam = (w_[0] - target) / w_[0];
        return {Zone::below_first, 0, lam, target};
    }
    const auto it = std::upper_bound(w_.begin(), w_.end(), target);
    const int k = static_cast<int>(it - w_.begin()) - 1;
    const double lam = (w_[k + 1] - target) / (w_[k + 1] - w_[k]);
    return {Zone::interior, k, lam, target};
}

namespace {

// Accumulator for one first-index row. Rows are filled independently (possibly
// in parallel) and reduced in ascending row order, which makes the result
// bit-identical for any worker count.
struct RateRow {
    std::vector<double> dm, loss;
    double cond = 0, ovf_m = 0, ovf_e = 0;
    OperatorLedger led[3];
    bool touched = false;

    void reset(int n) {
        dm.assign(n, 0.0);
        loss.assign(n, 0.0);
        cond = ovf_m = ovf_e = 0;
        led[0] = led[1] = led[2] = {};
        touched = false;
    }
};

struct RateSink {
    RateRow* row = nullptr;
    const CollisionTables* t = nullptr;
    double omega_max = 0;

    void gain(int op, const BinSplit& sp, double rho) {
        OperatorLedger& led = row->led[op];
        led.gross_mass += rho;
        led.gross_energy += rho * sp.target;
        switch (sp.zone) {
            case Zone::interior: {
                const double a = sp.frac_low * rho;
                row->dm[sp.cell] += a;
                row->dm[sp.cell + 1] += (1.0 - sp.frac_low) * rho;
                break;
            }
            case Zone::below_first: {
                const double to_cond = sp.frac_low * rho;
                row->cond += to_cond;
                row->dm[0] += (1.0 - sp.frac_low) * rho;
                led.condensate += to_cond;
                break;
            }
            case Zone::above_last: {
                row->dm[sp.cell] += sp.frac_low * rho;
                const double over = (1.0 - sp.frac_low) * rho;
                row->ovf_m += over;
                row->ovf_e += over * omega_max;
                led.overflow_mass += over;
                led.overflow_energy += over * omega_max;
                break;
            }
            case Zone::overflow: {
                row->ovf_m += rho;
                row->ovf_e += rho * sp.target;
                led.overflow_mass += rho;
                led.overflow_energy += rho * sp.target;
                break;
            }
        }
    }

    void lose(int op, int cell, double rho, double w) {
        row->dm[cell] -= rho;
        row->loss[cell] += rho;
        row->led[op].gross_mass += rho;
        row->led[op].gross_energy += rho * w;
    }

    void c12_forward(int i, int j, double rho) {
        lose(0, i, rho, t->rep(i));
        lose(0, j, rho, t->rep(j));
        gain(0, t->sum_split(i, j), rho);
    }
    void c12_backward(int i, int j, double rho) {
        lose(0, i, rho, t->rep(i));
        row->dm[j] += rho;
        row->led[0].gross_mass += rho;
        row->led[0].gross_energy += rho * t->rep(j);
        gain(0, t->diff_split(i, j), rho);
    }
    void c22(int i, int j, int l, double rho, const BinSplit& sp) {
        lose(1, i, rho, t->rep(i));
        lose(1, j, rho, t->rep(j));
        row->dm[l] += rho;
        row->led[1].gross_mass += rho;
        row->led[1].gross_energy += rho * t->rep(l);
        gain(1, sp, rho);
    }
    void c31_forward(int i, int j, int l, double rho, const BinSplit& sp) {
        lose(2, i, rho, t->rep(i));
        lose(2, j, rho, t->rep(j));
        lose(2, l, rho, t->rep(l));
        gain(2, sp, rho);
    }
    void c31_backward(int i, int j, int l, double rho, const BinSplit& sp) {
        lose(2, i, rho, t->rep(i));
        row->dm[j] += rho;
        row->dm[l] += rho;
        row->led[2].gross_mass += 2 * rho;
        row->led[2].gross_energy += rho * (t->rep(j) + t->rep(l));
        gain(2, sp, rho);
    }
};

// Weak-form accumulator: Xi applied at exact targets, nothing binned.
struct XiSink {
    const CollisionTables* t = nullptr;
    const std::vector<double>* xi_rep = nullptr;
    std::function<double(double)> xi;
    double value = 0, gross = 0;

    double at_rep(int i) const { return (*xi_rep)[i]; }

    void c12_forward(int i, int j, double rho) {
        const double xt = xi(t->rep(i) + t->rep(j));
        value += rho * (xt - at_rep(i) - at_rep(j));
        gross += rho * (std::abs(xt) + std::abs(at_rep(i)) + std::abs(at_rep(j)));
    }
    void c12_backward(int i, int j, double rho) {
        const double xt = xi(t->rep(i) - t->rep(j));
        value += rho * (xt + at_rep(j) - at_rep(i));
        gross += rho * (std::abs(xt) + std::abs(at_rep(i)) + std::abs(at_rep(j)));
    }
    void c22(int i, int j, int l, double rho, double target) {
        const double xt = xi(target);
        value += rho * (xt + at_rep(l) - at_rep(i) - at_rep(j));
        gross += rho * (std::abs(xt) + std::abs(at_rep(i)) + std::abs(at_rep(j)) +
                        std::abs(at_rep(l)));
    }
    void c31_forward(int i, int j, int l, double rho, double target) {
        const double xt = xi(target);
        value += rho * (xt - at_rep(i) - at_rep(j) - at_rep(l));
        gross += rho * (std::abs(xt) + std::abs(at_rep(i)) + std::abs(at_rep(j)) +
                        std::abs(at_rep(l)));
    }
    void c31_backward(int i, int j, int l, double rho, double target) {
        const double xt = xi(target);
        value += rho * (xt + at_rep(j) + at_rep(l) - at_rep(i));
        gross += rho * (std::abs(xt) + std::abs(at_rep(i)) + std::abs(at_rep(j)) +
                        std::abs(at_rep(l)));
    }
};

// Enumerate every interaction whose first index is `i`. Symmetric channels
// are collapsed: the pair channel runs unordered (i,j) with factor 2 off the
// diagonal, the triplet-merge channel runs unordered triples with the
// ordering multiplicity (1, 3 or 6), and the triplet-split channel keeps the
// dominant slot first with factor 2 on distinct partners. Rates fold the
// multiplicity in, and losses/gains are applied once per slot, so the result
// equals the plain sum over all ordered tuples.
template <class Sink, bool WithSplit>
void enumerate_row(const SpectralState& s, const CollisionTables& t, int i, Sink& sink) {
    const int n = t.grid().size();
    const auto& m = s.masses;
    const double mi = m[i];
    if (mi == 0.0) return;

    const auto& model = t.model();
    const auto& tog = t.toggles();
    const double c12 = tog.c12 ? model.couplings().c12 : 0.0;
    const double c22 = tog.c22 ? model.couplings().c22 : 0.0;
    const double c31 = tog.c31 ? model.couplings().c31 : 0.0;
    const double wi = t.rep(i);

    if (c12 > 0) {
        const double base_i = c12 * mi * t.bar_p(i);
        for (int j = 0; j < n; ++j) {
            if (m[j] == 0.0) continue;
            const double rho = base_i * m[j] * t.bar_p(j) * model.weight_p(wi + t.rep(j));
            if (rho != 0.0) sink.c12_forward(i, j, rho);
        }
        for (int j = 0; j < i; ++j) {
            if (m[j] == 0.0) continue;
            const double tau = wi - t.rep(j);
            const double rho = 2.0 * base_i * m[j] * t.bar_p(j) * model.weight_p(tau);
            if (rho != 0.0) sink.c12_backward(i, j, rho);
        }
    }

    if (c22 > 0) {
        const double ki = t.wavenumber(i);
        for (int j = i; j < n; ++j) {
            if (m[j] == 0.0) continue;
            const double mult = j == i ? 1.0 : 2.0;
            const double pre = mult * c22 * mi * m[j] * t.bar_r(i) * t.bar_r(j);
            const double wj = t.rep(j);
            const double kij = std::min(ki, t.wavenumber(j));
            const double inv_kij = 1.0 / (ki * t.wavenumber(j));
            for (int l = 0; l < n; ++l) {
                const double target = wi + wj - t.rep(l);
                if (target < 0) break;  // representatives ascend
                if (target == 0.0 || m[l] == 0.0) continue;
                const double kt = model.k_of_omega(target);
                const double kmin = std::min(std::min(kij, t.wavenumber(l)), kt);
                double rho = pre * m[l] * t.bar_r(l) * model.weight_r(target) * kmin *
                             inv_kij / t.wavenumber(l);
                if (tog.use_ro_factor)
                    rho *= model.weight_ro(wi, wj, t.rep(l), target);
                if (rho == 0.0) continue;
                if constexpr (WithSplit)
                    sink.c22(i, j, l, rho, t.locate(target));
                else
                    sink.c22(i, j, l, rho, target);
            }
        }
    }

    if (c31 > 0) {
        const double base_i = c31 * mi * t.bar_q(i);
        // merge: unordered i <= j <= l
        for (int j = i; j < n; ++j) {
            if (m[j] == 0.0) continue;
            const double pre = base_i * m[j] * t.bar_q(j);
            for (int l = j; l < n; ++l) {
                if (m[l] == 0.0) continue;
                double mult;
                if (i == j && j == l)
                    mult = 1.0;
                else if (i == j || j == l)  // i == l impossible for i <= j <= l unless all equal
                    mult = 3.0;
                else
                    mult = 6.0;
                const double target = wi + t.rep(j) + t.rep(l);
                const double rho = mult * pre * m[l] * t.bar_q(l) * model.weight_q(target);
                if (rho == 0.0) continue;
                if constexpr (WithSplit)
                    sink.c31_forward(i, j, l, rho, t.locate(target));
                else
                    sink.c31_forward(i, j, l, rho, target);
            }
        }
        // split: dominant slot i, unordered partners j <= l
        for (int j = 0; j < n; ++j) {
            if (2.0 * t.rep(j) > wi) break;
            if (m[j] == 0.0) continue;
            const double pre = 3.0 * base_i * m[j] * t.bar_q(j);
            for (int l = j; l < n; ++l) {
                const double target = wi - t.rep(j) - t.rep(l);
                if (target < 0) break;
                if (target == 0.0 || m[l] == 0.0) continue;
                const double mult = l == j ? 1.0 : 2.0;
                const double rho = mult * pre * m[l] * t.bar_q(l) * model.weight_q(target);
                if (rho == 0.0) continue;
                if constexpr (WithSplit)
                    sink.c31_backward(i, j, l, rho, t.locate(target));
                else
                    sink.c31_backward(i, j, l, rho, target);
            }
        }
    }
}

void check_state(const SpectralState& s, const CollisionTables& t) {
    if (!s.grid || !(s.grid == t.grid_ptr() || *s.grid == t.grid()))
        throw ConfigError("collision: state grid does not match tables grid");
    if (s.masses.size() != static_cast<size_t>(t.grid().size()))
        throw StateError("collision: state size does not match grid");
    for (size_t i = 0; i < s.masses.size(); ++i) {
        if (std::isnan(s.masses[i]))
            throw StateError("collision: NaN mass at cell " + std::to_string(i));
        if (s.masses[i] < 0)
            throw StateError("collision: negative mass at cell " + std::to_string(i));
    }
}

}  // namespace

RateResult apply(const SpectralState& s, const CollisionTables& t) {
    check_state(s, t);
    const int n = t.grid().size();

    std::vector<RateRow> slab(static_cast<size_t>(n));

#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        slab[i].reset(n);
        if (s.masses[i] == 0.0) continue;
        slab[i].touched = true;
        RateSink sink{&slab[i], &t, t.grid().omega_max()};
        enumerate_row<RateSink, true>(s, t, i, sink);
    }

    RateResult r;
    r.dm.assign(n, 0.0);
    r.loss.assign(n, 0.0);
    auto merge_ledger = [](OperatorLedger& a, const OperatorLedger& b) {
        a.gross_mass += b.gross_mass;
        a.gross_energy += b.gross_energy;
        a.overflow_mass += b.overflow_mass;
        a.overflow_energy += b.overflow_energy;
        a.condensate += b.condensate;
    };
    for (int i = 0; i < n; ++i) {
        const RateRow& row = slab[i];
        if (!row.touched) continue;
        for (int j = 0; j < n; ++j) {
            r.dm[j] += row.dm[j];
            r.loss[j] += row.loss[j];
        }
        r.condensate_rate += row.cond;
        r.overflow_mass_rate += row.ovf_m;
        r.overflow_energy_rate += row.ovf_e;
        merge_ledger(r.c12, row.led[0]);
        merge_ledger(r.c22, row.led[1]);
        merge_ledger(r.c31, row.led[2]);
    }
    return r;
}

WeakEvalResult weak_eval(const SpectralState& s, const CollisionTables& t,
                         const std::function<double(double)>& Xi) {
    check_state(s, t);
    const int n = t.grid().size();
    std::vector<double> xi_rep(n);
    for (int i = 0; i < n; ++i) xi_rep[i] = Xi(t.rep(i));

    XiSink sink;
    sink.t = &t;
    sink.xi_rep = &xi_rep;
    sink.xi = Xi;
    for (int i = 0; i < n; ++i) {
        if (s.masses[i] == 0.0) continue;
        enumerate_row<XiSink, false>(s, t, i, sink);
    }
    return {sink.value, sink.gross};
}

}  // namespace wavekin
