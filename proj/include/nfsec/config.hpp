// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_CONFIG_HPP
#define NFSEC_CONFIG_HPP

#include "nfsec/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nfsec
{
    enum class ExperimentKind
    {
        Beampattern,
        Constellation,
        BerGrid,
        BerSweep,
        SameDirection,
        SumrateMultipath,
        SecrecyRateSweep,
        OutageCurve,
        SecrecyMap,
        Validate
    };

    std::string to_string(ExperimentKind k);
    ExperimentKind parse_kind(const std::string &name);
    const std::vector<std::string> &experiment_kind_names();

    // How symbol gains, transmit power and the AN scale are resolved.
    struct PowerSpec
    {
        double noise_dbm = -105.0;
        std::optional<double> user_sinr_db; // beta_m = sqrt(sigma^2 10^(sinr/10)) for every user
        std::vector<double> beta;           // explicit symbol gains
        std::optional<double> transmit_dbm;
        std::optional<double> transmit_factor; // P_t = factor * static ZF power
        std::optional<double> static_share;    // P_t = static ZF power / share
        std::string xi_rule = "mean";          // bound | mean | exact | fixed | none
        double xi = 0.0;                       // used by "fixed"
    };

    // Rectangular lattice on a plane of constant z, in position units.
    struct GridSpec
    {
        double x_min = -0.5, x_max = 0.5;
        double y_min = 0.0, y_max = 1.0;
        double z = 0.55;
        int nx = 41, ny = 41;
    };

    struct SweepSpec
    {
        std::string variable; // pt_dbm | delta_m
        std::vector<double> values;
    };

    struct ExperimentConfig
    {
        Scenario scenario;
        bool fully_digital = false;
        double length_unit = 1.0; // metres per position unit
        double dF_unit = 1.0;     // metres per reported d_F unit
        PowerSpec power;
        ExperimentKind kind = ExperimentKind::Beampattern;
        GridSpec grid;
        SweepSpec sweep;
        std::size_t slots = 1000;
        std::size_t trials = 1;
        std::uint64_t seed = 0;
        std::string output_dir = "out";
        Eigen::Index stream = 0;
        std::vector<double> rate_targets{1.0, 3.0, 5.0, 8.0};
        double epsilon = 0.1;
        std::vector<double> sinr_db;
        std::vector<double> ray_scales;
        Eigen::Index ray_user = 1;
        int series_cap = 20000;
        std::size_t draws = 100;
        std::vector<int> path_counts;
        std::vector<Position3> probes; // extra positions of interest, metres
        std::string canonical;         // normalized config text, hashed into artifact metadata
    };

    struct ConfigOverrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> slots;
        std::optional<std::size_t> trials;
        std::optional<std::pair<int, int>> grid;
        std::optional<std::string> kind;
        std::optional<std::string> output_dir;
        bool full_scale = false;
    };

    ExperimentConfig parse_config(const std::string &text, const ConfigOverrides &ov = {});
    ExperimentConfig load_config(const std::string &path, const ConfigOverrides &ov = {});

    // Grid points in metres, x fastest.
    std::vector<Position3> grid_points(const ExperimentConfig &cfg);
}

#endif
