#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "wavekin/kernel.hpp"
#include "wavekin/spectrum.hpp"

namespace wavekin {

struct OperatorToggles {
    bool c12 = true;
    bool c22 = true;
    bool c31 = true;
    /// Include the max-frequency factor in the pair channel. The pair-channel
    /// weak form carries it; the toggle exists because the truncated-system
    /// display omits it.
    bool use_ro_factor = true;
};

/// Destination of a deposit at a target frequency, resolved against the
/// extended node set {condensate at 0, cell representatives, omega_max}.
/// Every split preserves the first moment of the deposited mass exactly:
/// frac_low * node_low + (1 - frac_low) * node_high = target.
struct BinSplit {
    enum class Zone : unsigned char {
        interior,     // frac_low to cells[cell], remainder to cells[cell+1]
        below_first,  // frac_low to the condensate, remainder to cells[0]
        above_last,   // frac_low to cells[last], remainder to overflow at omega_max
        overflow      // all mass to overflow, energy = target * mass
    };
    Zone zone = Zone::overflow;
    int cell = 0;
    double frac_low = 0;
    double target = 0;
};

/// Immutable per-grid caches for rate evaluation: bar-weight and wavenumber
/// factors at every representative, plus the pair split cache for sums and
/// differences of representatives. Triple targets are located on the fly.
class CollisionTables {
public:
    /// Throws ConfigError if the model fails its admissibility checks, unless
    /// allow_invalid is set. Also throws if any cached factor is non-finite.
    static CollisionTables build(GridPtr grid, KernelModel model, OperatorToggles toggles,
                                 bool allow_invalid = false);

    const FrequencyGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const KernelModel& model() const { return model_; }
    const OperatorToggles& toggles() const { return toggles_; }

    double bar_p(int i) const { return bar_p_[i]; }
    double bar_q(int i) const { return bar_q_[i]; }
    double bar_r(int i) const { return bar_r_[i]; }
    double weight_r_at(int i) const { return weight_r_[i]; }
    double wavenumber(int i) const { return k_[i]; }
    double rep(int i) const { return w_[i]; }

    /// Split for rep(i) + rep(j), any i, j.
    const BinSplit& sum_split(int i, int j) const { return sum_split_[tri(i, j)]; }
    /// Split for rep(i) - rep(j); requires i >= j.
    const BinSplit& diff_split(int i, int j) const { return diff_split_[tri(i, j)]; }

    /// Resolve an arbitrary non-negative target frequency.
    BinSplit locate(double target) const;

private:
    CollisionTables() = default;
    static size_t tri(int i, int j) {
        if (i < j) std::swap(i, j);
        return static_cast<size_t>(i) * (i + 1) / 2 + j;
    }

    GridPtr grid_;
    KernelModel model_;
    OperatorToggles toggles_;
    std::vector<double> w_, bar_p_, bar_q_, bar_r_, weight_r_, k_;
    std::vector<BinSplit> sum_split_, diff_split_;
};

/// Per-operator rate summary. Gross fluxes are sums of absolute transfers
/// (every loss and gain counted positively) and set the scale for roundoff
/// tolerances on the conservation ledgers.
struct OperatorLedger {
    double gross_mass = 0;
    double gross_energy = 0;
    double overflow_mass = 0;
    double overflow_energy = 0;
    double condensate = 0;
};

struct RateResult {
    std::vector<double> dm;    // net mass rate per cell
    std::vector<double> loss;  // gross loss rate per cell (>= 0), for step control
    double condensate_rate = 0;
    double overflow_mass_rate = 0;
    double overflow_energy_rate = 0;
    OperatorLedger c12, c22, c31;

    double gross_energy_total() const {
        return c12.gross_energy + c22.gross_energy + c31.gross_energy;
    }
    double gross_mass_total() const {
        return c12.gross_mass + c22.gross_mass + c31.gross_mass;
    }
};

/// Evaluate the instantaneous collision rates on a state. Deposits are binned
/// with first-moment-preserving splits; outputs above omega_max go to the
/// overflow ledger at their exact energy. Deterministic for any thread count:
/// rows indexed by the first interaction index are reduced in ascending order.
/// Throws StateError on NaN or negative input masses.
RateResult apply(const SpectralState& s, const CollisionTables& t);

struct WeakEvalResult {
    double value = 0;  // d/dt of <measure, Xi>
    double gross = 0;  // sum of |rate * Xi(node)| over all transfers (roundoff scale)
};

/// Same interaction enumeration as apply(), but Xi is applied at the exact
/// (un-split) target frequencies, so conservation identities hold to roundoff:
/// Xi = omega gives 0, Xi = 1 gives 0 for the pair channel and <= 0 for the
/// three-wave and triplet channels.
WeakEvalResult weak_eval(const SpectralState& s, const CollisionTables& t,
                         const std::function<double(double)>& Xi);

}  // namespace wavekin
