#pragma once

#include <string>
#include <vector>

namespace wavekin {

/// Power-law dispersion omega(k) = c_omega * k^(1/theta), 0 < theta < 1.
/// The inverse map and the radial Jacobian weight are closed forms.
struct DispersionLaw {
    double theta = 0.25;
    double c_omega = 1.0;

    double omega_of_k(double k_mag) const;  // domain: k_mag >= 0
    double k_of_omega(double omega) const;  // domain: omega >= 0
    /// gamma_weight(w) = k^2 / omega'(k) at k = k_of_omega(w)
    ///                 = theta * c_omega^(-3*theta) * w^(3*theta - 1).
    /// Domain: w > 0 (the power law may blow up or vanish at 0).
    double gamma_weight(double omega) const;

    void validate() const;  // throws ConfigError on out-of-range fields
};

/// Exponents and amplitudes of the factorized kernel family. The two-sided
/// envelope bounds are taken with equality, so every weight is an exact
/// power law:
///   tilde_p(w) = c_p * w^varpi1   =>  bar_p(w) = c_p * w^(1+varpi1)
///   tilde_r(w) = c_r * w^varpi2,  tilde_q(w) = c_q * w^varpi3.
struct KernelExponents {
    double varpi1 = -0.375;  // in [-1, 0]
    double varpi2 = -0.25;   // in [-1, 0]
    double varpi3 = -0.375;  // in [-1, 0]
    double kappa2 = 0.25;    // >= -1; enters threshold arithmetic only
    double gamma = 0.25;     // in [0, 1]; exponent of the max-frequency factor
    double alpha = 0.8;      // in (0, 1); concavity exponent of the a-priori test function
    double c_p = 1.0;
    double c_r = 1.0;
    double c_q = 1.0;
    double c_rprime = 1.0;  // amplitude of the derivative envelope; bookkeeping only

    void validate() const;
};

/// Interaction strengths of the three collision channels.
struct CouplingConstants {
    double c12 = 1.0;
    double c22 = 1.0;
    double c31 = 1.0;

    void validate() const;  // non-negative, and c12 + c22 + c31 > 0
};

/// Dispersion + kernel family + couplings, with the derived measure-side
/// weights precomputed:
///   weight_p(w) = gamma_weight(w) * bar_p(w)        = A_p * w^(3*theta + varpi1)
///   weight_q(w) = gamma_weight(w) * bar_q(w)        = A_q * w^(3*theta + varpi3)
///   weight_r(w) = gamma_weight(w) * bar_r(w) / k(w) = A_r * w^(2*theta + varpi2)
/// Each is evaluated as a single power so that weight(0) = 0 exactly whenever
/// its combined exponent is positive (the validator checks this).
class KernelModel {
public:
    KernelModel() { recompute(); }
    KernelModel(DispersionLaw d, KernelExponents e, CouplingConstants c)
        : dispersion_(d), exponents_(e), couplings_(c) {
        recompute();
    }

    const DispersionLaw& dispersion() const { return dispersion_; }
    const KernelExponents& exponents() const { return exponents_; }
    const CouplingConstants& couplings() const { return couplings_; }

    double omega_of_k(double k) const { return dispersion_.omega_of_k(k); }
    double k_of_omega(double w) const { return dispersion_.k_of_omega(w); }
    double gamma_weight(double w) const { return dispersion_.gamma_weight(w); }

    double bar_p(double w) const;
    double bar_q(double w) const;
    double bar_r(double w) const;

    double weight_p(double w) const;
    double weight_q(double w) const;
    double weight_r(double w) const;

    /// max(w, w1, w2, w3)^gamma, the dimensionless pair-channel factor.
    double weight_ro(double w, double w1, double w2, double w3) const;

    // Combined power-law exponents (useful for scaling tests and diagnostics).
    double weight_p_exponent() const { return 3.0 * dispersion_.theta + exponents_.varpi1; }
    double weight_q_exponent() const { return 3.0 * dispersion_.theta + exponents_.varpi3; }
    double weight_r_exponent() const { return 2.0 * dispersion_.theta + exponents_.varpi2; }

    void validate_ranges() const;  // type-range checks on all three components

private:
    void recompute();

    DispersionLaw dispersion_{};
    KernelExponents exponents_{};
    CouplingConstants couplings_{};

    // cached amplitudes
    double amp_p_ = 0, amp_q_ = 0, amp_r_ = 0;
};

/// One line of the validator's table. `satisfied` applies the comparator
/// embedded in `name`; `slack` is the signed distance into the feasible
/// region (>= 0 iff satisfied, except strict inequalities where 0 fails).
struct ConstraintCheck {
    std::string name;
    double lhs = 0;
    bool satisfied = false;
    double slack = 0;
};

/// Full admissibility report: the nine exponent inequalities, the three
/// vanishing-at-zero positivity checks, and the cascade thresholds.
struct ConstraintReport {
    std::vector<ConstraintCheck> inequalities;  // exactly nine
    std::vector<ConstraintCheck> positivity;    // weight_p/q/r exponent > 0

    double c_in = 0;                    // the tail exponent supplied by the caller
    double cin_threshold_immediate = 0; // c_in below this => immediate cascade regime
    double cin_threshold_finite = 0;    // c_in below this => finite-time cascade regime
    double sigma_upper_bound = 0;       // admissible sigma for the multiscale diagnostics
    double eps_plus_sigma_upper_bound = 0;
    double epsilon_upper_bound = 0;     // admissible eps at sigma = sigma_upper_bound
    double kappa2_analytic = 0;         // derivative exponent of the induced weight_r power law

    bool all_pass() const;
    /// nullptr if every check passes, else the first failing check.
    const ConstraintCheck* first_failure() const;
};

/// Pure function of its inputs; failures are reported, never thrown, and the
/// table is computed even for out-of-range parameters.
ConstraintReport validate_constraints(const KernelModel& model, double c_in);

}  // namespace wavekin
