#pragma once

#include <optional>
#include <string>
#include <variant>

#include "wavekin/cascade.hpp"
#include "wavekin/collision.hpp"
#include "wavekin/evolve.hpp"
#include "wavekin/kernel.hpp"
#include "wavekin/spectrum.hpp"

namespace wavekin {

struct GridSpec {
    GridKind kind = GridKind::geometric;
    double omega_min = 1.0;
    double omega_max = 65536.0;
    int cells = 128;
    RepRule rep = RepRule::automatic;

    GridPtr build() const;
};

struct PowerLawTailInit {
    double C_in = 1.0;
    double c_in = 0.001;
    double r0 = 1.0;
};

struct TableInit {
    std::string path;  // snapshot CSV to load
};

using InitSpec = std::variant<PowerLawTailInit, TableInit>;

/// Full run description, loadable from a single JSON document. Every field
/// has a default; unknown keys are rejected to catch typos in sweep axes.
struct RunConfig {
    DispersionLaw dispersion;
    KernelExponents exponents;
    CouplingConstants couplings;
    OperatorToggles toggles;
    GridSpec grid;
    InitSpec init = PowerLawTailInit{};
    StepControl step;
    CascadeSpec diagnostics;
    std::string out_dir = "out";

    KernelModel model() const { return KernelModel(dispersion, exponents, couplings); }
    SpectralState build_initial(const GridPtr& g) const;
};

RunConfig load_config_file(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& cfg);  // round-trips through parse_config

/// Axis of a sweep: dotted config key plus the values to substitute.
struct SweepAxis {
    std::string key;  // e.g. "init.c_in" or "kernel.gamma"
    std::vector<double> values;
};

/// Sweep axes are read from the optional "sweep.axes" object of the config
/// document; axes iterate in document order, last axis fastest.
std::vector<SweepAxis> load_sweep_axes(const std::string& path);

/// Apply `key = value` to the JSON form of a config and reparse.
RunConfig with_override(const RunConfig& cfg, const std::string& key, double value);

}  // namespace wavekin
