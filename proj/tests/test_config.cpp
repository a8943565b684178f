#include <doctest.h>

#include "wavekin/config.hpp"
#include "wavekin/errors.hpp"

using namespace wavekin;

TEST_CASE("config: defaults from an empty document") {
    const RunConfig cfg = parse_config("{}");
    CHECK(cfg.dispersion.theta == 0.25);
    CHECK(cfg.exponents.varpi2 == -0.25);
    CHECK(cfg.grid.kind == GridKind::geometric);
    CHECK(cfg.grid.cells == 128);
    CHECK(std::holds_alternative<PowerLawTailInit>(cfg.init));
    CHECK(cfg.step.method == StepMethod::euler);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("config: full document round trips through its JSON form") {
    const char* text = R"json({
      "schema": "wavekin-config-v1",
      "kernel": {"theta": 0.25, "c_omega": 2.0, "varpi1": -0.375, "c12": 0.5,
                 "enable_c22": false, "use_ro_factor": false},
      "grid": {"kind": "uniform", "omega_min": 0.0, "omega_max": 32.0, "cells": 16,
               "rep": "midpoint"},
      "init": {"kind": "power_law_tail", "C_in": 2.0, "c_in": 0.002, "r0": 1.5},
      "step": {"method": "heun", "dt_init": 1e-4, "dt_max": 1e-2, "t_end": 0.25,
               "snapshot_stride": 10},
      "diagnostics": {"probe_R": [2.0, 8.0], "ddm_levels": [3, 4], "sigma": 0.25,
                      "upsilon_override": 2, "level_set_integrand": "energy"},
      "output": {"dir": "scratch"}
    })json";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.dispersion.c_omega == 2.0);
    CHECK(cfg.couplings.c12 == 0.5);
    CHECK_FALSE(cfg.toggles.c22);
    CHECK_FALSE(cfg.toggles.use_ro_factor);
    CHECK(cfg.grid.kind == GridKind::uniform);
    CHECK(cfg.grid.rep == RepRule::midpoint);
    CHECK(std::get<PowerLawTailInit>(cfg.init).c_in == 0.002);
    CHECK(cfg.diagnostics.c_in == 0.002);  // mirrored from the tail init
    CHECK(cfg.step.method == StepMethod::heun);
    CHECK(cfg.step.probe_R == std::vector<double>{2.0, 8.0});
    CHECK(cfg.diagnostics.ddm_levels == std::vector<int>{3, 4});
    CHECK(cfg.diagnostics.upsilon_override == 2);
    CHECK(cfg.diagnostics.level_set_energy);
    CHECK(cfg.out_dir == "scratch");

    const RunConfig again = parse_config(config_to_json(cfg));
    CHECK(again.dispersion.c_omega == cfg.dispersion.c_omega);
    CHECK(again.step.dt_init == cfg.step.dt_init);
    CHECK(again.diagnostics.upsilon_override == cfg.diagnostics.upsilon_override);
    CHECK(std::get<PowerLawTailInit>(again.init).r0 ==
          std::get<PowerLawTailInit>(cfg.init).r0);
}

TEST_CASE("config: rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config("{\"kernel\": {\"thtea\": 0.2}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"grid\": {\"kind\": \"log\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"step\": {\"method\": 3}}"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"schema\": \"other-v9\"}"), ConfigError);
}

TEST_CASE("config: sweep override machinery") {
    const RunConfig cfg = parse_config("{}");
    const RunConfig c2 = with_override(cfg, "init.c_in", 0.004);
    CHECK(std::get<PowerLawTailInit>(c2.init).c_in == 0.004);
    const RunConfig c3 = with_override(cfg, "kernel.gamma", 0.125);
    CHECK(c3.exponents.gamma == 0.125);
    const RunConfig c4 = with_override(cfg, "grid.cells", 32.0);
    CHECK(c4.grid.cells == 32);
    CHECK_THROWS_AS(with_override(cfg, "kernel.nope", 1.0), ConfigError);
    CHECK_THROWS_AS(with_override(cfg, "..", 1.0), ConfigError);
}
