// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include "nfsec/experiments.hpp"

#include <filesystem>
#include <fstream>

using namespace nfsec;
namespace fs = std::filesystem;

namespace
{
    const char *base = R"({
  "seed": 11,
  "geometry": { "rows": 8, "cols": 8, "carrier_hz": 28e9 },
  "users": [[-0.2, 0.3, 0.5], [0.2, 0.3, 0.5]],
  "eves": [[0.0, 0.1, 0.5]],
  "n_rf": 6,
  "power": POWER,
  "experiment": { "kind": "beampattern", "slots": 50, "grid": { "nx": 5, "ny": 4 } }
})";

    ExperimentConfig with_power(const std::string &power)
    {
        std::string text = base;
        text.replace(text.find("POWER"), 5, power);
        return parse_config(text);
    }

    Design design(const ExperimentConfig &cfg)
    {
        const CMatrix H = channel_matrix(cfg.scenario.geometry, std::span<const Position3>(cfg.scenario.users));
        return design_precoder(cfg, H, cfg.scenario.beta());
    }
}

TEST_CASE("user SINR target sets the symbol gains")
{
    const auto cfg = with_power(R"({ "noise_dbm": -100, "user_sinr_db": 10 })");
    const double beta = std::sqrt(dbm_to_watts(-100) * 10.0);
    for (double b : cfg.scenario.symbol_gains)
        CHECK(b == doctest::Approx(beta).epsilon(1e-12));
}

TEST_CASE("transmit factor scales the static power")
{
    const auto d = design(with_power(R"({ "user_sinr_db": 10, "transmit_factor": 3, "xi_rule": "mean" })"));
    CHECK(d.transmit_power == doctest::Approx(3 * d.state.static_power()).epsilon(1e-12));
    CHECK(d.state.xi == doctest::Approx(xi_mean(d.state, d.transmit_power)).epsilon(1e-12));
}

TEST_CASE("budget with a share rescales the symbol gains")
{
    const auto d = design(with_power(R"({ "beta": [1, 2], "transmit_dbm": 10, "static_share": 0.25 })"));
    CHECK(d.transmit_power == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(d.state.static_power() == doctest::Approx(0.0025).epsilon(1e-10));
    CHECK(d.state.beta(1) / d.state.beta(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("factor cannot be combined with a budget")
{
    CHECK_THROWS_AS(with_power(R"({ "user_sinr_db": 10, "transmit_factor": 3, "transmit_dbm": 10 })"), ValidationError);
}

TEST_CASE("fixed and disabled xi rules")
{
    CHECK(design(with_power(R"({ "user_sinr_db": 10, "xi_rule": "fixed", "xi": 0.125 })")).state.xi == 0.125);
    CHECK(design(with_power(R"({ "user_sinr_db": 10, "xi_rule": "none" })")).state.xi == 0.0);
}

TEST_CASE("a budget below the static power is infeasible")
{
    const auto cfg = with_power(R"({ "user_sinr_db": 60, "transmit_dbm": -60, "xi_rule": "bound" })");
    CHECK_THROWS_AS(design(cfg), Infeasible);
}

TEST_CASE("beampattern artifacts cover the grid")
{
    const auto cfg = with_power(R"({ "user_sinr_db": 10, "transmit_factor": 2 })");
    const auto res = run_experiment(cfg);
    REQUIRE(!res.artifacts.empty());
    CHECK(res.passed);
    CHECK(res.artifacts[0].rows.size() % 20 == 0);
}

TEST_CASE("artifacts are written with sidecars and identical on rerun")
{
    const auto cfg = with_power(R"({ "user_sinr_db": 10, "transmit_factor": 2 })");
    const fs::path dir = fs::temp_directory_path() / "nfsec_test_artifacts";
    fs::remove_all(dir);
    const auto first = write_artifacts(run_experiment(cfg), cfg, dir / "a");
    const auto second = write_artifacts(run_experiment(cfg), cfg, dir / "b");
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i)
    {
        std::ifstream fa(first[i], std::ios::binary), fb(second[i], std::ios::binary);
        const std::string ta{std::istreambuf_iterator<char>(fa), {}}, tb{std::istreambuf_iterator<char>(fb), {}};
        CHECK(!ta.empty());
        CHECK(ta == tb);
    }
}

TEST_CASE("a failed write leaves no partial artifacts")
{
    const auto cfg = with_power(R"({ "user_sinr_db": 10, "transmit_factor": 2 })");
    const auto res = run_experiment(cfg);
    REQUIRE(res.artifacts.size() >= 2);
    const fs::path dir = fs::temp_directory_path() / "nfsec_test_partial";
    fs::remove_all(dir);
    // block the second artifact with a directory of the same name
    fs::create_directories(dir / (res.artifacts[1].name + ".csv"));
    CHECK_THROWS_AS(write_artifacts(res, cfg, dir), IoError);
    CHECK(!fs::exists(dir / (res.artifacts[0].name + ".csv")));
    CHECK(!fs::exists(dir / (res.artifacts[0].name + ".meta.json")));
}
