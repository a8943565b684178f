#include "wavekin/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavekin/errors.hpp"

namespace wavekin {

namespace {
using Interval = DdmPartition::Interval;
}

DdmPartition build_partition(int ell, const KernelExponents& e, double epsilon,
                             std::optional<int> upsilon_override) {
    if (ell < 1) throw ConfigError("partition: level must be >= 1");

    DdmPartition p;
    p.ell = ell;
    p.omega = std::ldexp(1.0, ell);

    if (upsilon_override) {
        if (*upsilon_override < 0) throw ConfigError("partition: upsilon override must be >= 0");
        p.upsilon = *upsilon_override;
    } else {
        const double a = ell / 4.0 * (4.0 * e.varpi2 + e.alpha + e.gamma);
        const double b = ell * epsilon / 16.0;
        const double m = std::min(a, b);
        if (m < 0) {
            std::ostringstream msg;
            msg << "partition: level formula is negative (min(" << a << ", " << b
                << ") < 0); the exponents place level " << ell
                << " outside the admissible regime - supply an upsilon override";
            throw ConfigError(msg.str());
        }
        p.upsilon = static_cast<int>(std::floor(m));
    }
    if (p.upsilon > 24) throw ConfigError("partition: 2^upsilon subdomains is too many");

    const int count = 1 << p.upsilon;
    p.delta = p.omega / count;
    const double om = p.omega, d = p.delta;

    // Non-overlapping: D_{count-1-i} = [om + i*d, om + (i+1)*d), D_0 unbounded.
    p.non_overlapping.assign(count, {});
    for (int i = 0; i + 1 < count; ++i)
        p.non_overlapping[count - 1 - i] = {om + i * d, om + (i + 1) * d, false};
    p.non_overlapping[0] = {2 * om - d, 0, true};

    // Overlapping companions. The four explicit intervals win where the
    // generic index map collides with them, the unbounded pair outranking the
    // left-edge pair; starts are clipped to om.
    p.overlapping.assign(count, {});
    for (int idx = 2; idx <= count - 3; ++idx) {
        const int i = count - idx;
        p.overlapping[idx] = {om + (i - 1) * d, om + (i + 2) * d, false};
    }
    if (count >= 3) p.overlapping[count - 2] = {om, om + 3 * d, false};
    if (count >= 2) p.overlapping[count - 1] = {om, om + 2 * d, false};
    p.overlapping[0] = {std::max(om, 2 * om - 2 * d), 0, true};
    if (count >= 2) p.overlapping[1] = {std::max(om, 2 * om - 3 * d), 0, true};
    if (count == 1) p.overlapping[0] = {om, 0, true};

    return p;
}

namespace {

double integral_over(const SpectralState& s, const Interval& iv, bool energy) {
    double acc = 0;
    for (int i = 0; i < s.grid->size(); ++i) {
        const double w = s.grid->rep(i);
        if (iv.contains(w)) acc += energy ? s.masses[i] * w : s.masses[i];
    }
    if (iv.unbounded) acc += energy ? s.overflow_energy : s.overflow_mass;
    return acc;
}

double tail_integral(const SpectralState& s, double omega, bool energy) {
    Interval iv{omega, 0, true};
    return integral_over(s, iv, energy);
}

// Lebesgue measure of an indicator series by the trapezoid rule.
double indicator_measure(const std::vector<char>& ind, std::span<const double> times) {
    double acc = 0;
    for (size_t k = 0; k + 1 < ind.size(); ++k)
        acc += 0.5 * (ind[k] + ind[k + 1]) * (times[k + 1] - times[k]);
    return acc;
}

}  // namespace

LevelSetMeasures level_sets(std::span<const SpectralState> snapshots,
                            std::span<const double> times, const DdmPartition& p, double c_o,
                            double sigma, bool use_energy) {
    if (snapshots.empty() || snapshots.size() != times.size())
        throw ConfigError("level_sets: empty or inconsistent trajectory");
    if (!(c_o > 0) || !(sigma > 0))
        throw ConfigError("level_sets: c_o and sigma must be positive");
    if (p.omega >= snapshots.front().grid->omega_max())
        throw ConfigError("level_sets: partition level lies at or above the grid truncation");

    const size_t nsnap = snapshots.size();
    const int count = static_cast<int>(p.overlapping.size());

    LevelSetMeasures out;
    out.ell = p.ell;
    out.energy_weighted = use_energy;
    out.threshold_global = c_o * std::pow(p.omega, -sigma);
    out.threshold_sub = c_o * std::pow(2.0 * p.omega, -sigma);
    out.horizon = times.back() - times.front();
    for (size_t k = 0; k + 1 < nsnap; ++k)
        out.max_snapshot_spacing = std::max(out.max_snapshot_spacing, times[k + 1] - times[k]);

    std::vector<char> ind_M(nsnap);
    std::vector<std::vector<char>> ind_sub(count, std::vector<char>(nsnap));
    for (size_t k = 0; k < nsnap; ++k) {
        ind_M[k] = tail_integral(snapshots[k], p.omega, use_energy) >= out.threshold_global;
        for (int i = 0; i < count; ++i)
            ind_sub[i][k] =
                integral_over(snapshots[k], p.overlapping[i], use_energy) >= out.threshold_sub;
    }

    out.M = indicator_measure(ind_M, times);
    out.M_i.resize(count);
    for (int i = 0; i < count; ++i) out.M_i[i] = indicator_measure(ind_sub[i], times);

    std::vector<char> ind_N(nsnap), ind_P(nsnap), ind_Q(nsnap);
    const int p_lo = p.upsilon == 0 ? 0 : (1 << (p.upsilon - 1)) - 1;
    for (size_t k = 0; k < nsnap; ++k) {
        bool any = false, in_p = false, in_q = false;
        for (int i = 0; i < count; ++i) {
            if (!ind_sub[i][k]) continue;
            any = true;
            if (i >= p_lo)
                in_p = true;
            else
                in_q = true;
        }
        ind_N[k] = ind_M[k] && !any;
        ind_P[k] = in_p;
        ind_Q[k] = in_q;
    }
    out.N = indicator_measure(ind_N, times);
    out.P = indicator_measure(ind_P, times);
    out.Q = indicator_measure(ind_Q, times);
    return out;
}

double default_lambda(double sigma) { return 1.0 - std::pow(2.0, -sigma); }

Concentration classify_concentration(const SpectralState& s, const DdmPartition& p,
                                     double lambda) {
    if (!(lambda > 0 && lambda < 1))
        throw ConfigError("classify_concentration: lambda must lie in (0,1)");
    const double tail = tail_integral(s, p.omega, true);
    if (tail <= 0) return Concentration::spread;
    const double cut = (1.0 - lambda) * tail;
    for (const auto& iv : p.overlapping)
        if (integral_over(s, iv, true) >= cut) return Concentration::concentrated;
    return Concentration::spread;
}

FluxBoundTerms flux_bound_terms(const SpectralState& s, const DdmPartition& p,
                                const KernelModel& model, double lambda) {
    const auto& e = model.exponents();
    const double th = model.dispersion().theta;
    const double om = p.omega;

    // gather tail cells once
    std::vector<double> w, ew;  // rep and m*rep
    for (int i = 0; i < s.grid->size(); ++i) {
        if (s.grid->rep(i) >= om && s.masses[i] > 0) {
            w.push_back(s.grid->rep(i));
            ew.push_back(s.masses[i] * s.grid->rep(i));
        }
    }

    FluxBoundTerms out;
    const double e12 = 3 * th + e.varpi1 + e.alpha - 2;
    const double e31 = 3 * th + e.varpi3 + e.alpha - 2;
    const size_t n = w.size();

    std::vector<double> pw1(n), pw3(n);
    for (size_t i = 0; i < n; ++i) {
        pw1[i] = std::pow(w[i], e.varpi1 + 1);
        pw3[i] = std::pow(w[i], e.varpi3);
    }

    double tail_e = 0;
    for (size_t i = 0; i < n; ++i) tail_e += ew[i];

    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            out.t12 += ew[i] * ew[j] * std::pow(w[i] + w[j], e12) * pw1[i] * pw1[j];

    out.t22 = std::pow(lambda, 4) * p.delta * p.delta *
              std::pow(om, 4 * e.varpi2 - 2 + e.alpha + e.gamma) * tail_e * tail_e * tail_e;

    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t l = 0; l < n; ++l)
                out.t31 += ew[i] * ew[j] * ew[l] * std::pow(w[i] + w[j] + w[l], e31) * pw3[i] *
                           pw3[j] * pw3[l] * (w[i] * w[j] + w[j] * w[l] + w[l] * w[i]);

    return out;
}

std::optional<double> estimate_tstar(std::span<const double> times,
                                     std::span<const double> grid_energy,
                                     double initial_total_energy, double tol) {
    if (!(tol > 0 && tol < 1)) throw ConfigError("estimate_tstar: tol must lie in (0,1)");
    if (times.size() != grid_energy.size() || times.empty())
        throw ConfigError("estimate_tstar: inconsistent series");
    const double threshold = (1.0 - tol) * initial_total_energy;
    if (grid_energy.front() < threshold) return times.front();
    for (size_t k = 1; k < times.size(); ++k) {
        if (grid_energy[k] < threshold) {
            const double e0 = grid_energy[k - 1], e1 = grid_energy[k];
            const double t0 = times[k - 1], t1 = times[k];
            const double f = e0 == e1 ? 1.0 : (e0 - threshold) / (e0 - e1);
            return t0 + f * (t1 - t0);
        }
    }
    return std::nullopt;
}

CascadeReport compute_report(std::span<const SpectralState> snapshots,
                             std::span<const double> snapshot_times,
                             std::span<const double> series_times,
                             std::span<const double> series_grid_energy,
                             double initial_total_energy, const KernelModel& model,
                             const CascadeSpec& spec) {
    CascadeReport rep;
    rep.tstar_tol = spec.tstar_tol;
    rep.energy_weighted = spec.level_set_energy;
    rep.c_o = spec.c_o;
    rep.sigma = spec.sigma;
    rep.lambda = spec.lambda ? *spec.lambda : default_lambda(spec.sigma);
    rep.epsilon = spec.epsilon;
    rep.upsilon_override = spec.upsilon_override;
    rep.level_indices = spec.ddm_levels;
    rep.snapshot_times.assign(snapshot_times.begin(), snapshot_times.end());

    if (!series_times.empty())
        rep.tstar = estimate_tstar(series_times, series_grid_energy, initial_total_energy,
                                   spec.tstar_tol);

    const auto cref = validate_constraints(model, spec.c_in);
    rep.cin_threshold_immediate = cref.cin_threshold_immediate;
    rep.cin_threshold_finite = cref.cin_threshold_finite;
    rep.sigma_upper_bound = cref.sigma_upper_bound;
    rep.epsilon_upper_bound = cref.epsilon_upper_bound;

    for (int ell : spec.ddm_levels) {
        const DdmPartition p =
            build_partition(ell, model.exponents(), spec.epsilon, spec.upsilon_override);
        rep.levels.push_back(level_sets(snapshots, snapshot_times, p, spec.c_o, spec.sigma,
                                        spec.level_set_energy));
        std::vector<Concentration> conc;
        std::vector<FluxBoundTerms> flux;
        conc.reserve(snapshots.size());
        flux.reserve(snapshots.size());
        for (const auto& s : snapshots) {
            conc.push_back(classify_concentration(s, p, rep.lambda));
            flux.push_back(flux_bound_terms(s, p, model, rep.lambda));
        }
        rep.concentration.push_back(std::move(conc));
        rep.flux_terms.push_back(std::move(flux));
    }
    return rep;
}

}  // namespace wavekin
