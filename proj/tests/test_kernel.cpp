#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wavekin/errors.hpp"
#include "wavekin/kernel.hpp"

using namespace wavekin;

namespace {

// omega(k) = k^4 family with the reference exponent choice; every module test
// that needs a concrete admissible model starts from this.
KernelModel baseline() {
    DispersionLaw d{0.25, 1.0};
    KernelExponents e;  // defaults are the reference choice
    CouplingConstants c{1.0, 1.0, 1.0};
    return KernelModel(d, e, c);
}

}  // namespace

TEST_CASE("dispersion: forward map") {
    DispersionLaw d{0.25, 1.0};
    CHECK(d.omega_of_k(2.0) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(d.omega_of_k(0.0) == 0.0);
    // superadditivity sample: omega(1) + omega(1) <= omega(2)
    CHECK(d.omega_of_k(1.0) + d.omega_of_k(1.0) <= d.omega_of_k(2.0));
    CHECK_THROWS_AS(d.omega_of_k(-1.0), std::domain_error);
}

TEST_CASE("dispersion: inverse map and round trip") {
    DispersionLaw d{0.25, 1.0};
    CHECK(d.k_of_omega(16.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d.k_of_omega(0.0) == 0.0);
    CHECK_THROWS_AS(d.k_of_omega(-0.5), std::domain_error);

    const double w = 7.3;
    CHECK(std::abs(d.omega_of_k(d.k_of_omega(w)) - w) / w <= 1e-14);

    DispersionLaw d2{0.37, 2.6};
    for (double x = 1e-6; x < 1e9; x *= 7.3) {
        const double rt = d2.omega_of_k(d2.k_of_omega(x));
        CHECK(std::abs(rt - x) <= 1e-13 * x);
    }
}

TEST_CASE("dispersion: jacobian weight closed form") {
    DispersionLaw d{0.25, 1.0};
    CHECK(d.gamma_weight(16.0) == doctest::Approx(0.125).epsilon(1e-14));
    DispersionLaw d3{1.0 / 3.0, 1.0};
    CHECK(d3.gamma_weight(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(d.gamma_weight(0.0), std::domain_error);
    CHECK_THROWS_AS(d.gamma_weight(-1.0), std::domain_error);

    // power-law scaling: gamma(2w)/gamma(w) = 2^(3 theta - 1)
    const double expect = std::pow(2.0, 3 * 0.25 - 1.0);
    for (double w = 0.01; w < 1e6; w *= 13.7)
        CHECK(d.gamma_weight(2 * w) / d.gamma_weight(w) ==
              doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("kernel weights: values, zeros, monotonicity, scaling") {
    const KernelModel m = baseline();
    CHECK(m.weight_p(0.0) == 0.0);
    CHECK(m.weight_q(0.0) == 0.0);
    CHECK(m.weight_r(0.0) == 0.0);
    // weight_p(w) = (1/4) w^0.375 for the baseline
    CHECK(m.weight_p(1.0) == doctest::Approx(0.25).epsilon(1e-14));

    double prev_p = 0, prev_q = 0, prev_r = 0;
    for (double w = 1e-3; w < 1e7; w *= 3.1) {
        CHECK(m.weight_p(w) >= prev_p);
        CHECK(m.weight_q(w) >= prev_q);
        CHECK(m.weight_r(w) >= prev_r);
        prev_p = m.weight_p(w);
        prev_q = m.weight_q(w);
        prev_r = m.weight_r(w);

        CHECK(m.weight_p(2 * w) / m.weight_p(w) ==
              doctest::Approx(std::pow(2.0, m.weight_p_exponent())).epsilon(1e-13));
        CHECK(m.weight_q(2 * w) / m.weight_q(w) ==
              doctest::Approx(std::pow(2.0, m.weight_q_exponent())).epsilon(1e-13));
        CHECK(m.weight_r(2 * w) / m.weight_r(w) ==
              doctest::Approx(std::pow(2.0, m.weight_r_exponent())).epsilon(1e-13));
    }

    // bar and full weights agree through the jacobian
    for (double w : {0.3, 2.0, 47.0}) {
        CHECK(m.weight_p(w) ==
              doctest::Approx(m.gamma_weight(w) * m.bar_p(w)).epsilon(1e-13));
        CHECK(m.weight_r(w) ==
              doctest::Approx(m.gamma_weight(w) * m.bar_r(w) / m.k_of_omega(w)).epsilon(1e-13));
    }
}

TEST_CASE("kernel weights: max-frequency factor") {
    const KernelModel m = baseline();
    CHECK(m.weight_ro(1, 2, 3, 4) == doctest::Approx(std::pow(4.0, 0.25)).epsilon(1e-15));
    CHECK(m.weight_ro(0, 0, 0, 0) == 0.0);
    KernelExponents e;
    e.gamma = 0.0;
    const KernelModel m0(DispersionLaw{0.25, 1.0}, e, CouplingConstants{});
    CHECK(m0.weight_ro(5, 1, 2, 3) == 1.0);
}

TEST_CASE("validator: baseline passes everything") {
    const ConstraintReport r = validate_constraints(baseline(), 0.001);
    REQUIRE(r.inequalities.size() == 9);
    REQUIRE(r.positivity.size() == 3);
    CHECK(r.all_pass());
}

TEST_CASE("validator: named failure for varpi1 = 0") {
    KernelExponents e;
    e.varpi1 = 0.0;
    const KernelModel m(DispersionLaw{0.25, 1.0}, e, CouplingConstants{});
    const ConstraintReport r = validate_constraints(m, 0.001);
    CHECK_FALSE(r.all_pass());
    bool found = false;
    for (const auto& c : r.inequalities) {
        if (c.name == "3*theta + 2*varpi1 <= 0") {
            found = true;
            CHECK_FALSE(c.satisfied);
            CHECK(c.lhs == doctest::Approx(0.75).epsilon(1e-15));
        } else {
            CHECK(c.satisfied);
        }
    }
    CHECK(found);
}

TEST_CASE("validator: cascade thresholds") {
    const ConstraintReport r = validate_constraints(baseline(), 0.001);
    // 1/5 * min{0.05/3, 0.425/2, 0.05/6, 1.249}
    CHECK(std::abs(r.cin_threshold_immediate - 0.0016666666666666668) <= 1e-6);
    CHECK(r.cin_threshold_finite == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(r.sigma_upper_bound == r.cin_threshold_immediate);
    // eps + sigma bound: min{0.625, 1.249, 0.25}/10
    CHECK(r.eps_plus_sigma_upper_bound == doctest::Approx(0.025).epsilon(1e-13));
    CHECK(r.epsilon_upper_bound ==
          doctest::Approx(0.025 - r.sigma_upper_bound).epsilon(1e-13));
    // configured kappa2 = 1/4 vs the literal derivative exponent 2 theta + varpi2 - 1
    CHECK(r.kappa2_analytic == doctest::Approx(-0.75).epsilon(1e-15));
    // c_in = 0.001 sits below the immediate-cascade threshold
    CHECK(r.c_in < r.cin_threshold_immediate);
}

TEST_CASE("validator: pure function, bit-identical reports") {
    const ConstraintReport a = validate_constraints(baseline(), 0.0023);
    const ConstraintReport b = validate_constraints(baseline(), 0.0023);
    REQUIRE(a.inequalities.size() == b.inequalities.size());
    for (size_t i = 0; i < a.inequalities.size(); ++i) {
        CHECK(a.inequalities[i].lhs == b.inequalities[i].lhs);
        CHECK(a.inequalities[i].slack == b.inequalities[i].slack);
    }
    CHECK(a.cin_threshold_immediate == b.cin_threshold_immediate);
    CHECK(a.epsilon_upper_bound == b.epsilon_upper_bound);
}

TEST_CASE("type range validation") {
    DispersionLaw d{1.5, 1.0};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    KernelExponents e;
    e.alpha = 1.0;
    CHECK_THROWS_AS(e.validate(), ConfigError);
    CouplingConstants c{0, 0, 0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(baseline().validate_ranges());
}
