#include "wavekin/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wavekin/errors.hpp"

namespace wavekin {

double DispersionLaw::omega_of_k(double k_mag) const {
    if (k_mag < 0) throw std::domain_error("omega_of_k: negative wavenumber");
    return c_omega * std::pow(k_mag, 1.0 / theta);
}

double DispersionLaw::k_of_omega(double omega) const {
    if (omega < 0) throw std::domain_error("k_of_omega: negative frequency");
    return std::pow(omega / c_omega, theta);
}

double DispersionLaw::gamma_weight(double omega) const {
    if (omega <= 0) throw std::domain_error("gamma_weight: frequency must be positive");
    return theta * std::pow(c_omega, -3.0 * theta) * std::pow(omega, 3.0 * theta - 1.0);
}

void DispersionLaw::validate() const {
    if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("dispersion: theta must lie in (0,1)");
    if (!(c_omega > 0.0)) throw ConfigError("dispersion: c_omega must be positive");
}

void KernelExponents::validate() const {
    auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
    if (!in(varpi1, -1.0, 0.0)) throw ConfigError("kernel: varpi1 must lie in [-1,0]");
    if (!in(varpi2, -1.0, 0.0)) throw ConfigError("kernel: varpi2 must lie in [-1,0]");
    if (!in(varpi3, -1.0, 0.0)) throw ConfigError("kernel: varpi3 must lie in [-1,0]");
    if (!(kappa2 >= -1.0)) throw ConfigError("kernel: kappa2 must be >= -1");
    if (!in(gamma, 0.0, 1.0)) throw ConfigError("kernel: gamma must lie in [0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("kernel: alpha must lie in (0,1)");
    if (!(c_p > 0 && c_r > 0 && c_q > 0 && c_rprime > 0))
        throw ConfigError("kernel: amplitudes c_p, c_r, c_q, c_rprime must be positive");
}

void CouplingConstants::validate() const {
    if (c12 < 0 || c22 < 0 || c31 < 0)
        throw ConfigError("couplings: c12, c22, c31 must be non-negative");
    if (!(c12 + c22 + c31 > 0))
        throw ConfigError("couplings: at least one of c12, c22, c31 must be positive");
}

void KernelModel::recompute() {
    const double th = dispersion_.theta;
    const double cw = dispersion_.c_omega;
    amp_p_ = th * std::pow(cw, -3.0 * th) * exponents_.c_p;
    amp_q_ = th * std::pow(cw, -3.0 * th) * exponents_.c_q;
    amp_r_ = th * std::pow(cw, -2.0 * th) * exponents_.c_r;
}

double KernelModel::bar_p(double w) const { return exponents_.c_p * std::pow(w, 1.0 + exponents_.varpi1); }
double KernelModel::bar_q(double w) const { return exponents_.c_q * std::pow(w, 1.0 + exponents_.varpi3); }
double KernelModel::bar_r(double w) const { return exponents_.c_r * std::pow(w, 1.0 + exponents_.varpi2); }

double KernelModel::weight_p(double w) const { return amp_p_ * std::pow(w, weight_p_exponent()); }
double KernelModel::weight_q(double w) const { return amp_q_ * std::pow(w, weight_q_exponent()); }
double KernelModel::weight_r(double w) const { return amp_r_ * std::pow(w, weight_r_exponent()); }

double KernelModel::weight_ro(double w, double w1, double w2, double w3) const {
    const double m = std::max(std::max(w, w1), std::max(w2, w3));
    return std::pow(m, exponents_.gamma);
}

void KernelModel::validate_ranges() const {
    dispersion_.validate();
    exponents_.validate();
    couplings_.validate();
}

bool ConstraintReport::all_pass() const { return first_failure() == nullptr; }

const ConstraintCheck* ConstraintReport::first_failure() const {
    for (const auto& c : inequalities)
        if (!c.satisfied) return &c;
    for (const auto& c : positivity)
        if (!c.satisfied) return &c;
    return nullptr;
}

namespace {

ConstraintCheck strict_positive(std::string name, double lhs) {
    return {std::move(name), lhs, lhs > 0.0, lhs};
}
ConstraintCheck non_negative(std::string name, double lhs) {
    return {std::move(name), lhs, lhs >= 0.0, lhs};
}
ConstraintCheck non_positive(std::string name, double lhs) {
    return {std::move(name), lhs, lhs <= 0.0, -lhs};
}

}  // namespace

ConstraintReport validate_constraints(const KernelModel& model, double c_in) {
    const auto& e = model.exponents();
    const double th = model.dispersion().theta;
    const double w1 = e.varpi1, w2 = e.varpi2, w3 = e.varpi3;
    const double k2 = e.kappa2, g = e.gamma, a = e.alpha;

    ConstraintReport r;
    r.c_in = c_in;

    r.inequalities.push_back(strict_positive("4*varpi3 + 3*theta + alpha > 0", 4 * w3 + 3 * th + a));
    r.inequalities.push_back(strict_positive("3*varpi1 + 3*theta + alpha > 0", 3 * w1 + 3 * th + a));
    r.inequalities.push_back(strict_positive("4*varpi2 + 3 + alpha + gamma > 0", 4 * w2 + 3 + a + g));
    r.inequalities.push_back(strict_positive("3*varpi2 + 2 - 2*theta > 0", 3 * w2 + 2 - 2 * th));
    r.inequalities.push_back(non_negative("gamma + kappa2 >= 0", g + k2));
    r.inequalities.push_back(non_positive("3*theta + 2*varpi1 <= 0", 3 * th + 2 * w1));
    r.inequalities.push_back(non_positive("2*theta + 2*varpi2 <= 0", 2 * th + 2 * w2));
    r.inequalities.push_back(non_positive("3*theta + 2*varpi3 <= 0", 3 * th + 2 * w3));
    r.inequalities.push_back(non_negative("2*varpi2 + theta + gamma >= 0", 2 * w2 + th + g));

    r.positivity.push_back(strict_positive("weight_p vanishes at 0: 3*theta + varpi1 > 0", 3 * th + w1));
    r.positivity.push_back(strict_positive("weight_q vanishes at 0: 3*theta + varpi3 > 0", 3 * th + w3));
    r.positivity.push_back(strict_positive("weight_r vanishes at 0: 2*theta + varpi2 > 0", 2 * th + w2));

    const double b1 = (4 * w3 + 3 * th + a) / 3.0;
    const double b2 = (3 * w1 + 3 * th + a) / 2.0;
    const double b3 = (4 * w2 + a + g) / 6.0;
    const double b4 = 3 * w2 + 2 - 2 * th + k2 - c_in + g;
    r.cin_threshold_immediate = std::min(std::min(b1, b2), std::min(b3, b4)) / 5.0;
    r.cin_threshold_finite = 3 * w2 + 2 - 2 * th + k2 + g;
    r.sigma_upper_bound = r.cin_threshold_immediate;

    const double p1 = 3 * th + 3 * w1 + 1;
    const double p2 = 3 * w2 + 2 - 2 * th + k2 - c_in + g;
    const double p3 = 3 * th + 4 * w3 + 1;
    r.eps_plus_sigma_upper_bound = std::min(std::min(p1, p2), p3) / 10.0;
    r.epsilon_upper_bound = r.eps_plus_sigma_upper_bound - r.sigma_upper_bound;

    // The induced weight_r power law differentiates to exponent 2*theta + varpi2 - 1,
    // which need not equal the configured kappa2; report both so the gap is visible.
    r.kappa2_analytic = 2 * th + w2 - 1;

    return r;
}

}  // namespace wavekin
