#include "wavekin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wavekin/errors.hpp"

namespace wavekin {

namespace {

// Compensated (Kahan) accumulator; summation order is always ascending cell
// index so identical inputs give bit-identical results.
struct KahanSum {
    double s = 0, c = 0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

void format_double(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

}  // namespace

FrequencyGrid FrequencyGrid::make(GridKind kind, double omega_min, double omega_max, int cells,
                                  RepRule rep) {
    if (cells < 2) throw ConfigError("grid: need at least 2 cells");
    if (!(omega_min >= 0) || !(omega_min < omega_max))
        throw ConfigError("grid: need 0 <= omega_min < omega_max");
    if (kind == GridKind::geometric && !(omega_min > 0))
        throw ConfigError("grid: geometric spacing requires omega_min > 0");

    FrequencyGrid g;
    g.kind_ = kind;
    g.edges_.resize(static_cast<size_t>(cells) + 1);
    if (kind == GridKind::uniform) {
        const double h = (omega_max - omega_min) / cells;
        for (int i = 0; i <= cells; ++i) g.edges_[i] = omega_min + h * i;
    } else {
        const double ratio = std::pow(omega_max / omega_min, 1.0 / cells);
        for (int i = 0; i <= cells; ++i)
            g.edges_[i] = omega_min * std::pow(ratio, static_cast<double>(i));
    }
    g.edges_.front() = omega_min;
    g.edges_.back() = omega_max;

    const RepRule rule = rep != RepRule::automatic
                             ? rep
                             : (kind == GridKind::geometric ? RepRule::geometric_mean
                                                            : RepRule::midpoint);
    g.reps_.resize(static_cast<size_t>(cells));
    for (int i = 0; i < cells; ++i) {
        const double lo = g.edges_[i], hi = g.edges_[i + 1];
        g.reps_[i] = rule == RepRule::midpoint ? 0.5 * (lo + hi) : std::sqrt(lo * hi);
    }

    for (int i = 0; i < cells; ++i) {
        if (!(g.edges_[i] < g.edges_[i + 1]))
            throw ConfigError("grid: edges are not strictly increasing");
        if (!(g.reps_[i] >= g.edges_[i] && g.reps_[i] < g.edges_[i + 1]))
            throw ConfigError("grid: representative escaped its cell");
    }
    return g;
}

FrequencyGrid FrequencyGrid::from_arrays(GridKind kind, std::vector<double> edges,
                                         std::vector<double> reps) {
    if (edges.size() != reps.size() + 1 || reps.size() < 2)
        throw DataError("grid: inconsistent edge/representative arrays");
    FrequencyGrid g;
    g.kind_ = kind;
    g.edges_ = std::move(edges);
    g.reps_ = std::move(reps);
    for (size_t i = 0; i < g.reps_.size(); ++i) {
        if (!(g.edges_[i] < g.edges_[i + 1]))
            throw DataError("grid: edges are not strictly increasing");
        if (!(g.reps_[i] >= g.edges_[i] && g.reps_[i] < g.edges_[i + 1]))
            throw DataError("grid: representative outside its cell");
    }
    return g;
}

int FrequencyGrid::cell_of(double w) const {
    if (w < edges_.front()) return -1;
    if (w >= edges_.back()) return size();
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), w);
    return static_cast<int>(it - edges_.begin()) - 1;
}

SpectralState SpectralState::zero(GridPtr grid) {
    SpectralState s;
    s.masses.assign(static_cast<size_t>(grid->size()), 0.0);
    s.grid = std::move(grid);
    return s;
}

SpectralState init_power_law_tail(GridPtr grid, double C_in, double c_in, double r0) {
    if (!(C_in > 0)) throw ConfigError("init: C_in must be positive");
    if (!(c_in > 0)) throw ConfigError("init: c_in must be positive");
    if (!(r0 >= grid->omega_min() && r0 < grid->omega_max()))
        throw ConfigError("init: r0 must lie inside the grid");

    SpectralState s = SpectralState::zero(grid);
    const int n = grid->size();

    // integral of F over [a,b]: c_in*C_in/(c_in+1) * (a^(-c_in-1) - b^(-c_in-1))
    auto mass_integral = [&](double a, double b) {
        return c_in * C_in / (c_in + 1.0) *
               (std::pow(a, -c_in - 1.0) - std::pow(b, -c_in - 1.0));
    };

    for (int i = 0; i + 1 < n; ++i) {
        const double a = std::max(grid->edge(i), r0);
        const double b = grid->edge(i + 1);
        if (b > a) s.masses[i] = mass_integral(a, b);
    }
    // Final cell: whole remaining tail energy int_a^inf w F dw = C_in * a^(-c_in),
    // placed as mass at the representative.
    const double a_last = std::max(grid->edge(n - 1), r0);
    s.masses[n - 1] = C_in * std::pow(a_last, -c_in) / grid->rep(n - 1);
    return s;
}

Moments moments(const SpectralState& s) {
    Moments m;
    KahanSum mass, energy;
    const auto& reps = *s.grid;
    for (int i = 0; i < s.grid->size(); ++i) {
        mass.add(s.masses[i]);
        energy.add(s.masses[i] * reps.rep(i));
    }
    m.grid_mass = mass.value();
    m.grid_energy = energy.value();
    m.condensate_mass = s.condensate_mass;
    m.overflow_mass = s.overflow_mass;
    m.overflow_energy = s.overflow_energy;
    m.total_mass = m.grid_mass + m.condensate_mass + m.overflow_mass;
    m.total_energy = m.grid_energy + m.overflow_energy;
    return m;
}

double tail_energy(const SpectralState& s, double R) {
    KahanSum acc;
    for (int i = 0; i < s.grid->size(); ++i)
        if (s.grid->rep(i) >= R) acc.add(s.masses[i] * s.grid->rep(i));
    return acc.value();
}

double tail_mass(const SpectralState& s, double R) {
    KahanSum acc;
    for (int i = 0; i < s.grid->size(); ++i)
        if (s.grid->rep(i) >= R) acc.add(s.masses[i]);
    return acc.value();
}

double weighted_functional(const SpectralState& s, const std::function<double(double)>& Xi) {
    KahanSum acc;
    for (int i = 0; i < s.grid->size(); ++i) acc.add(s.masses[i] * Xi(s.grid->rep(i)));
    return acc.value() + s.condensate_mass * Xi(0.0);
}

double convex_tail_functional(const SpectralState& s, double R) {
    KahanSum acc;
    for (int i = 0; i < s.grid->size(); ++i) {
        const double x = s.grid->rep(i) - R;
        if (x > 0) acc.add(s.masses[i] * x);
    }
    return acc.value() + (s.overflow_energy - R * s.overflow_mass);
}

void write_snapshot_csv(std::ostream& os, const SpectralState& s) {
    os << "# wavekin-snapshot v1\n";
    os << "# kind=" << (s.grid->kind() == GridKind::geometric ? "geometric" : "uniform");
    os << " time=";
    format_double(os, s.time);
    os << " condensate_mass=";
    format_double(os, s.condensate_mass);
    os << " overflow_mass=";
    format_double(os, s.overflow_mass);
    os << " overflow_energy=";
    format_double(os, s.overflow_energy);
    os << "\n";
    os << "i,omega_lo,omega_hi,omega_rep,mass\n";
    for (int i = 0; i < s.grid->size(); ++i) {
        os << i << ',';
        format_double(os, s.grid->edge(i));
        os << ',';
        format_double(os, s.grid->edge(i + 1));
        os << ',';
        format_double(os, s.grid->rep(i));
        os << ',';
        format_double(os, s.masses[i]);
        os << '\n';
    }
}

SpectralState read_snapshot_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# wavekin-snapshot v1", 0) != 0)
        throw DataError("snapshot: missing or unsupported schema header");
    if (!std::getline(is, line) || line.rfind("# kind=", 0) != 0)
        throw DataError("snapshot: missing metadata line");

    GridKind kind = GridKind::uniform;
    double time = 0, cond = 0, ovf_m = 0, ovf_e = 0;
    {
        std::istringstream meta(line.substr(2));
        std::string tok;
        while (meta >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw DataError("snapshot: malformed metadata");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "kind")
                kind = val == "geometric" ? GridKind::geometric : GridKind::uniform;
            else if (key == "time")
                time = std::strtod(val.c_str(), nullptr);
            else if (key == "condensate_mass")
                cond = std::strtod(val.c_str(), nullptr);
            else if (key == "overflow_mass")
                ovf_m = std::strtod(val.c_str(), nullptr);
            else if (key == "overflow_energy")
                ovf_e = std::strtod(val.c_str(), nullptr);
        }
    }
    if (!std::getline(is, line) || line != "i,omega_lo,omega_hi,omega_rep,mass")
        throw DataError("snapshot: missing column header");

    std::vector<double> edges, reps, masses;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double lo, hi, rep, mass;
        long idx;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf", &idx, &lo, &hi, &rep, &mass) != 5)
            throw DataError("snapshot: malformed row: " + line);
        if (idx != static_cast<long>(masses.size()))
            throw DataError("snapshot: rows out of order");
        if (edges.empty()) edges.push_back(lo);
        if (lo != edges.back()) throw DataError("snapshot: cells are not contiguous");
        edges.push_back(hi);
        reps.push_back(rep);
        masses.push_back(mass);
    }
    if (masses.size() < 2) throw DataError("snapshot: fewer than 2 cells");

    SpectralState s;
    s.grid = std::make_shared<FrequencyGrid>(
        FrequencyGrid::from_arrays(kind, std::move(edges), std::move(reps)));
    s.masses = std::move(masses);
    s.condensate_mass = cond;
    s.overflow_mass = ovf_m;
    s.overflow_energy = ovf_e;
    s.time = time;
    return s;
}

}  // namespace wavekin
