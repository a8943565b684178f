#pragma once

#include <stdexcept>
#include <string>

namespace wavekin {

/// Bad configuration: parameter ranges, grid specs, file schemas.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid simulation state fed to an operation (NaN or negative mass).
class StateError : public std::runtime_error {
public:
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or corrupt on-disk artifacts.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// The positivity-preserving step controller ran out of room: dt fell below
/// dt_min while retrying. Carries the state of the failed step.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(const std::string& what, double t, double dt, int binding_cell)
        : std::runtime_error(what), time(t), dt_last(dt), cell(binding_cell) {}
    double time;
    double dt_last;
    int cell;  // index of the cell whose loss rate forced the bound, -1 if unknown
};

}  // namespace wavekin
