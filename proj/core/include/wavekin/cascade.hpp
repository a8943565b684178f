#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavekin/kernel.hpp"
#include "wavekin/spectrum.hpp"

namespace wavekin {

/// Dyadic decomposition of [Omega, inf) at level ell: Omega = 2^ell split into
/// 2^Upsilon width-Delta subdomains (the last one unbounded) plus their
/// widened overlapping companions.
struct DdmPartition {
    struct Interval {
        double lo = 0;
        double hi = 0;  // ignored when unbounded
        bool unbounded = false;
        bool contains(double w) const { return w >= lo && (unbounded || w < hi); }
    };

    int ell = 0;
    double omega = 0;  // 2^ell
    int upsilon = 0;
    double delta = 0;  // omega / 2^upsilon
    std::vector<Interval> non_overlapping;  // indexed 0 .. 2^upsilon - 1
    std::vector<Interval> overlapping;
};

/// Level formula: Upsilon = floor(min(ell/4 * (4*varpi2 + alpha + gamma),
/// ell * epsilon / 16)), override available because the formula gives 0 for
/// any level reachable on a desk-scale grid. Throws ConfigError when the
/// formula goes negative and no override is supplied.
DdmPartition build_partition(int ell, const KernelExponents& exponents, double epsilon,
                             std::optional<int> upsilon_override = std::nullopt);

/// Time-set measures at one level. All entries lie in [0, T]; the trapezoid
/// of snapshot indicators is the estimator, so each measure carries an error
/// up to the largest snapshot spacing (reported alongside).
struct LevelSetMeasures {
    int ell = 0;
    bool energy_weighted = false;
    double threshold_global = 0;  // c_o * Omega_ell^-sigma
    double threshold_sub = 0;     // c_o * Omega_{ell+1}^-sigma
    double horizon = 0;
    double max_snapshot_spacing = 0;
    double M = 0;                 // tail above threshold anywhere in [Omega, inf)
    std::vector<double> M_i;      // per overlapping subdomain
    double N = 0;                 // M minus every subdomain event
    double P = 0;                 // union over the upper half of subdomain indices
    double Q = 0;                 // union over the lower half
};

/// The flag selects the integrand: tail mass (the set definitions) or tail
/// energy (the variant the pumping argument weighs by omega). Unbounded
/// subdomains include the overflow accumulator.
LevelSetMeasures level_sets(std::span<const SpectralState> snapshots,
                            std::span<const double> times, const DdmPartition& p, double c_o,
                            double sigma, bool use_energy);

enum class Concentration { concentrated, spread };

/// Spread iff every overlapping subdomain carries strictly less than
/// (1 - lambda) of the tail energy on [Omega, inf). Scale-invariant.
Concentration classify_concentration(const SpectralState& s, const DdmPartition& p,
                                     double lambda);

/// Default lambda = 1 - 2^-sigma.
double default_lambda(double sigma);

/// The three non-negative flux-bound integrands evaluated on the discrete
/// state over the tail [Omega, inf): a three-wave pair sum, the pair-channel
/// surrogate lambda^4 * Delta^2 * Omega^(4*varpi2 - 2 + alpha + gamma) *
/// (tail energy)^3, and a triplet sum. Universal prefactors are reported as 1.
struct FluxBoundTerms {
    double t12 = 0;
    double t22 = 0;
    double t31 = 0;
};
FluxBoundTerms flux_bound_terms(const SpectralState& s, const DdmPartition& p,
                                const KernelModel& model, double lambda);

/// First time at which grid energy drops below (1 - tol) of the initial total
/// energy, linearly interpolated between samples; nullopt if never reached.
std::optional<double> estimate_tstar(std::span<const double> times,
                                     std::span<const double> grid_energy,
                                     double initial_total_energy, double tol);

/// Everything the analyzer produces for one trajectory.
struct CascadeReport {
    double tstar_tol = 0;
    std::optional<double> tstar;
    bool energy_weighted = false;
    double c_o = 0, sigma = 0, lambda = 0, epsilon = 0;
    std::optional<int> upsilon_override;

    std::vector<LevelSetMeasures> levels;
    // per level, per snapshot
    std::vector<std::vector<Concentration>> concentration;
    std::vector<std::vector<FluxBoundTerms>> flux_terms;
    std::vector<double> snapshot_times;
    std::vector<int> level_indices;

    // threshold cross-references from the validator
    double cin_threshold_immediate = 0;
    double cin_threshold_finite = 0;
    double sigma_upper_bound = 0;
    double epsilon_upper_bound = 0;
};

struct CascadeSpec {
    std::vector<int> ddm_levels{8};
    double epsilon = 0.01;
    double sigma = 0.001;
    double c_o = 1.0;
    std::optional<double> lambda;  // default 1 - 2^-sigma
    double tstar_tol = 0.01;
    std::optional<int> upsilon_override;
    bool level_set_energy = false;  // integrand flag for the level sets
    double c_in = 0.001;            // threshold cross-reference input
};

CascadeReport compute_report(std::span<const SpectralState> snapshots,
                             std::span<const double> snapshot_times,
                             std::span<const double> series_times,
                             std::span<const double> series_grid_energy,
                             double initial_total_energy, const KernelModel& model,
                             const CascadeSpec& spec);

}  // namespace wavekin
