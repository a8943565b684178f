#include <doctest.h>

#include <cmath>
#include <random>

#include "wavekin/cascade.hpp"
#include "wavekin/errors.hpp"

using namespace wavekin;

namespace {

KernelExponents baseline_exponents() { return KernelExponents{}; }

GridPtr wide_grid() {
    return std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, 64));
}

}  // namespace

TEST_CASE("partition: formula case at level 8") {
    // min(2 * 0.05, 8 * 0.01 / 16) = 0.005 -> Upsilon = 0
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01);
    CHECK(p.omega == 256.0);
    CHECK(p.upsilon == 0);
    CHECK(p.delta == 256.0);
    REQUIRE(p.non_overlapping.size() == 1);
    CHECK(p.non_overlapping[0].lo == 256.0);
    CHECK(p.non_overlapping[0].unbounded);
    REQUIRE(p.overlapping.size() == 1);
    CHECK(p.overlapping[0].lo == 256.0);
    CHECK(p.overlapping[0].unbounded);
}

TEST_CASE("partition: override case at level 4 with four subdomains") {
    const DdmPartition p = build_partition(4, baseline_exponents(), 0.01, 2);
    CHECK(p.omega == 16.0);
    CHECK(p.upsilon == 2);
    CHECK(p.delta == 4.0);
    REQUIRE(p.non_overlapping.size() == 4);
    CHECK(p.non_overlapping[3].lo == 16.0);
    CHECK(p.non_overlapping[3].hi == 20.0);
    CHECK(p.non_overlapping[2].lo == 20.0);
    CHECK(p.non_overlapping[2].hi == 24.0);
    CHECK(p.non_overlapping[1].lo == 24.0);
    CHECK(p.non_overlapping[1].hi == 28.0);
    CHECK(p.non_overlapping[0].lo == 28.0);
    CHECK(p.non_overlapping[0].unbounded);

    REQUIRE(p.overlapping.size() == 4);
    CHECK(p.overlapping[3].lo == 16.0);
    CHECK(p.overlapping[3].hi == 24.0);
    CHECK(p.overlapping[2].lo == 16.0);
    CHECK(p.overlapping[2].hi == 28.0);
    CHECK(p.overlapping[1].lo == 20.0);
    CHECK(p.overlapping[1].unbounded);
    CHECK(p.overlapping[0].lo == 24.0);
    CHECK(p.overlapping[0].unbounded);
}

TEST_CASE("partition: tiling without gaps or overlaps") {
    for (int ups : {0, 1, 2, 3, 4}) {
        const DdmPartition p = build_partition(6, baseline_exponents(), 0.01, ups);
        const int count = 1 << ups;
        REQUIRE(static_cast<int>(p.non_overlapping.size()) == count);
        // D_{count-1} starts at Omega; descending index walks up the axis
        CHECK(p.non_overlapping[count - 1].lo == p.omega);
        for (int idx = count - 1; idx > 0; --idx)
            CHECK(p.non_overlapping[idx].hi == p.non_overlapping[idx - 1].lo);
        CHECK(p.non_overlapping[0].unbounded);
        // every subdomain is covered by its overlapping companion
        for (int idx = 0; idx < count; ++idx) {
            CHECK(p.overlapping[idx].lo <= p.non_overlapping[idx].lo);
            if (!p.overlapping[idx].unbounded) {
                REQUIRE_FALSE(p.non_overlapping[idx].unbounded);
                CHECK(p.overlapping[idx].hi >= p.non_overlapping[idx].hi);
            }
        }
    }
}

TEST_CASE("partition: errors") {
    CHECK_THROWS_AS(build_partition(0, baseline_exponents(), 0.01), ConfigError);
    KernelExponents bad;
    bad.varpi2 = -0.9;
    bad.alpha = 0.1;
    bad.gamma = 0.0;  // 4*varpi2 + alpha + gamma < 0
    CHECK_THROWS_AS(build_partition(8, bad, 0.01), ConfigError);
    CHECK_NOTHROW(build_partition(8, bad, 0.01, 1));
}

TEST_CASE("level sets: zero trajectory") {
    const auto g = wide_grid();
    std::vector<SpectralState> snaps(3, SpectralState::zero(g));
    std::vector<double> times{0.0, 0.5, 1.0};
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    const LevelSetMeasures m = level_sets(snaps, times, p, 1.0, 0.5, false);
    CHECK(m.M == 0.0);
    CHECK(m.N == 0.0);
    CHECK(m.P == 0.0);
    CHECK(m.Q == 0.0);
}

TEST_CASE("level sets: static state concentrated in the unbounded subdomain") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    const double c_o = 1.0, sigma = 0.5;
    SpectralState s = SpectralState::zero(g);
    // put ten times the global threshold into D_0 = [2*Omega - Delta, inf)
    for (int i = 0; i < g->size(); ++i)
        if (g->rep(i) >= p.non_overlapping[0].lo) {
            s.masses[i] = 10.0 * c_o * std::pow(p.omega, -sigma);
            break;
        }
    std::vector<SpectralState> snaps(5, s);
    std::vector<double> times{0, 0.25, 0.5, 0.75, 1.0};
    const LevelSetMeasures m = level_sets(snaps, times, p, c_o, sigma, false);
    CHECK(m.M == doctest::Approx(1.0));
    CHECK(m.M_i[0] == doctest::Approx(1.0));
    CHECK(m.N == 0.0);
    // companions 0 and 1 both reach the loaded far tail: index 1 feeds P,
    // index 0 feeds Q
    CHECK(m.P == doctest::Approx(1.0));
    CHECK(m.Q == doctest::Approx(1.0));
}

TEST_CASE("level sets: decay through the threshold at mid-horizon") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 1);
    const double c_o = 1.0, sigma = 0.5;
    const double threshold = c_o * std::pow(p.omega, -sigma);

    const int nsnap = 41;
    std::vector<SpectralState> snaps;
    std::vector<double> times;
    const double T = 2.0;
    int cell = 0;
    while (g->rep(cell) < p.omega) ++cell;
    for (int k = 0; k < nsnap; ++k) {
        const double t = T * k / (nsnap - 1);
        SpectralState s = SpectralState::zero(g);
        // scales linearly through the threshold exactly at t = T/2
        s.masses[cell] = 2.0 * threshold * (1.0 - t / T);
        s.time = t;
        snaps.push_back(std::move(s));
        times.push_back(t);
    }
    const LevelSetMeasures m = level_sets(snaps, times, p, c_o, sigma, false);
    const double spacing = T / (nsnap - 1);
    CHECK(std::abs(m.M - T / 2) <= spacing + 1e-12);
    CHECK(m.max_snapshot_spacing == doctest::Approx(spacing));
}

TEST_CASE("level sets: monotone in the threshold parameters") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    std::vector<SpectralState> snaps;
    std::vector<double> times;
    for (int k = 0; k < 9; ++k) {
        SpectralState s = SpectralState::zero(g);
        for (int i = 0; i < g->size(); ++i)
            s.masses[i] = 0.05 * std::exp(-0.4 * k) / (1.0 + i);
        snaps.push_back(std::move(s));
        times.push_back(k * 0.125);
    }
    double prev = 2.0;  // above any measure
    for (double c_o : {0.001, 0.01, 0.1}) {
        const LevelSetMeasures m = level_sets(snaps, times, p, c_o, 0.5, false);
        CHECK(m.M <= prev + 1e-12);
        prev = m.M;
    }
    // raising sigma lowers the threshold c_o * Omega^-sigma (Omega >= 2), so
    // the measure can only grow
    prev = -1.0;
    for (double sigma : {0.1, 0.5, 1.0}) {
        const LevelSetMeasures m = level_sets(snaps, times, p, 1.0, sigma, false);
        CHECK(m.M >= prev - 1e-12);
        prev = m.M;
    }
}

TEST_CASE("level sets: measures bounded by the horizon, N inside M") {
    std::mt19937 rng(8086);
    const auto g = wide_grid();
    const DdmPartition p = build_partition(7, baseline_exponents(), 0.01, 2);
    std::uniform_real_distribution<double> mass(0.0, 1e-2);
    for (int rep = 0; rep < 8; ++rep) {
        std::vector<SpectralState> snaps;
        std::vector<double> times;
        const double T = 1.0;
        for (int k = 0; k < 7; ++k) {
            SpectralState s = SpectralState::zero(g);
            for (int i = 0; i < g->size(); ++i) s.masses[i] = mass(rng);
            snaps.push_back(std::move(s));
            times.push_back(T * k / 6.0);
        }
        const LevelSetMeasures m = level_sets(snaps, times, p, 1e-3, 0.4, rep % 2 == 0);
        CHECK(m.M >= 0.0);
        CHECK(m.M <= T + 1e-12);
        CHECK(m.N >= 0.0);
        CHECK(m.N <= m.M + 1e-12);
        CHECK(m.P <= T + 1e-12);
        CHECK(m.Q <= T + 1e-12);
        for (double mi : m.M_i) {
            CHECK(mi >= 0.0);
            CHECK(mi <= T + 1e-12);
        }
    }
}

TEST_CASE("level sets: partition beyond the grid is rejected") {
    const auto g = wide_grid();  // truncated at 2^16
    std::vector<SpectralState> snaps(2, SpectralState::zero(g));
    std::vector<double> times{0.0, 1.0};
    const DdmPartition p = build_partition(17, baseline_exponents(), 0.01, 1);
    CHECK_THROWS_AS(level_sets(snaps, times, p, 1.0, 0.5, false), ConfigError);
}

TEST_CASE("concentration: single loaded subdomain") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    SpectralState s = SpectralState::zero(g);
    for (int i = 0; i < g->size(); ++i)
        if (p.non_overlapping[3].contains(g->rep(i))) s.masses[i] = 1.0;
    CHECK(classify_concentration(s, p, 0.5) == Concentration::concentrated);
    CHECK(classify_concentration(s, p, 0.0001) == Concentration::concentrated);
}

TEST_CASE("concentration: uniform spread over four subdomains") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    SpectralState s = SpectralState::zero(g);
    // equal tail ENERGY in each bounded subdomain; none in the far tail
    for (int d = 0; d < 4; ++d) {
        const auto& iv = p.non_overlapping[d];
        const double lo = iv.lo;
        const double hi = iv.unbounded ? 2 * p.omega : iv.hi;
        for (int i = 0; i < g->size(); ++i) {
            const double w = g->rep(i);
            if (w >= lo && w < hi) {
                s.masses[i] = 1.0 / w;  // unit energy per loaded cell
                break;
            }
        }
    }
    // widest companion covers 3/4 of the tail energy; 1 - lambda = 0.9 > 3/4
    CHECK(classify_concentration(s, p, 0.1) == Concentration::spread);
    // tiny lambda: spread unless one companion carries essentially everything
    CHECK(classify_concentration(s, p, 1e-9) == Concentration::spread);
    // large lambda: any loaded companion trips the test
    CHECK(classify_concentration(s, p, 0.99) == Concentration::concentrated);
}

TEST_CASE("concentration: invariant under uniform scaling") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01, 2);
    SpectralState s = SpectralState::zero(g);
    for (int i = 0; i < g->size(); ++i) s.masses[i] = 1.0 / (1.0 + i * i);
    const auto c1 = classify_concentration(s, p, 0.3);
    for (auto& m : s.masses) m *= 3.7e4;
    CHECK(classify_concentration(s, p, 0.3) == c1);
}

TEST_CASE("flux bound terms: zero tail and single cell") {
    const auto g = wide_grid();
    const DdmPartition p = build_partition(8, baseline_exponents(), 0.01);
    const KernelModel model(DispersionLaw{0.25, 1.0}, baseline_exponents(),
                            CouplingConstants{});
    const double lambda = 0.25;

    const FluxBoundTerms z = flux_bound_terms(SpectralState::zero(g), p, model, lambda);
    CHECK(z.t12 == 0.0);
    CHECK(z.t22 == 0.0);
    CHECK(z.t31 == 0.0);

    SpectralState s = SpectralState::zero(g);
    int cell = 0;
    while (g->rep(cell) < p.omega) ++cell;
    const double w = g->rep(cell), mass = 0.5, ew = mass * w;
    s.masses[cell] = mass;
    const FluxBoundTerms f = flux_bound_terms(s, p, model, lambda);

    const auto& e = model.exponents();
    const double th = model.dispersion().theta;
    const double t12 = ew * ew * std::pow(2 * w, 3 * th + e.varpi1 + e.alpha - 2) *
                       std::pow(w, 2 * (e.varpi1 + 1));
    const double t22 = std::pow(lambda, 4) * p.delta * p.delta *
                       std::pow(p.omega, 4 * e.varpi2 - 2 + e.alpha + e.gamma) * ew * ew * ew;
    const double t31 = ew * ew * ew * std::pow(3 * w, 3 * th + e.varpi3 + e.alpha - 2) *
                       std::pow(w, 3 * e.varpi3) * 3 * w * w;
    CHECK(f.t12 == doctest::Approx(t12).epsilon(1e-12));
    CHECK(f.t22 == doctest::Approx(t22).epsilon(1e-12));
    CHECK(f.t31 == doctest::Approx(t31).epsilon(1e-12));
}

TEST_CASE("tstar estimator") {
    // constant energy: never crosses
    std::vector<double> t{0, 1, 2, 3};
    std::vector<double> e{4, 4, 4, 4};
    CHECK_FALSE(estimate_tstar(t, e, 4.0, 0.05).has_value());

    // linear decay E0 (1 - t/10), tol 0.05 -> crossing at t = 0.5
    std::vector<double> t2, e2;
    for (int k = 0; k <= 40; ++k) {
        t2.push_back(k * 0.1);
        e2.push_back(8.0 * (1.0 - t2.back() / 10.0));
    }
    const auto ts = estimate_tstar(t2, e2, 8.0, 0.05);
    REQUIRE(ts.has_value());
    CHECK(*ts == doctest::Approx(0.5).epsilon(1e-12));

    // immediate loss: crossing within the first interval
    std::vector<double> t3{0.0, 0.01, 0.02};
    std::vector<double> e3{1.0, 0.5, 0.4};
    const auto ts3 = estimate_tstar(t3, e3, 1.0, 0.05);
    REQUIRE(ts3.has_value());
    CHECK(*ts3 <= 0.01);

    // monotone in tol
    const auto lo = estimate_tstar(t2, e2, 8.0, 0.01);
    const auto hi = estimate_tstar(t2, e2, 8.0, 0.2);
    REQUIRE(lo.has_value());
    REQUIRE(hi.has_value());
    CHECK(*lo <= *hi);
}

TEST_CASE("compute_report ties the pieces together") {
    const auto g = wide_grid();
    std::vector<SpectralState> snaps;
    std::vector<double> times;
    for (int k = 0; k < 4; ++k) {
        SpectralState s = SpectralState::zero(g);
        for (int i = 0; i < g->size(); ++i) s.masses[i] = 1e-3 / (1.0 + i);
        s.time = k * 0.25;
        snaps.push_back(std::move(s));
        times.push_back(k * 0.25);
    }
    std::vector<double> st{0.1, 0.2, 0.3};
    std::vector<double> se{1.0, 0.9, 0.8};

    const KernelModel model(DispersionLaw{0.25, 1.0}, baseline_exponents(),
                            CouplingConstants{});
    CascadeSpec spec;
    spec.ddm_levels = {6, 8};
    spec.sigma = 0.5;
    spec.upsilon_override = 1;
    const CascadeReport rep =
        compute_report(snaps, times, st, se, 1.0, model, spec);
    CHECK(rep.levels.size() == 2);
    CHECK(rep.concentration.size() == 2);
    CHECK(rep.flux_terms[0].size() == snaps.size());
    CHECK(rep.lambda == doctest::Approx(1.0 - std::pow(2.0, -0.5)));
    REQUIRE(rep.tstar.has_value());  // energy dropped 20% in the synthetic series
    CHECK(rep.cin_threshold_finite == doctest::Approx(1.25));
}
