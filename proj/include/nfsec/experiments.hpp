// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_EXPERIMENTS_HPP
#define NFSEC_EXPERIMENTS_HPP

#include "nfsec/config.hpp"
#include "nfsec/csv.hpp"
#include "nfsec/montecarlo.hpp"

#include <filesystem>
#include <vector>

namespace nfsec
{
    struct Design
    {
        State state;
        double transmit_power = 0;
    };

    // Analog stage, ZF stage, transmit power and xi as the config prescribes.
    Design design_precoder(const ExperimentConfig &cfg, const CMatrix &H_U, const RVector &beta);

    double resolve_transmit_power(const ExperimentConfig &cfg, double static_power);
    double resolve_xi(const ExperimentConfig &cfg, const State &state, double transmit_power);

    struct ExperimentResult
    {
        std::vector<CsvArtifact> artifacts;
        bool passed = true; // false only when a validate check failed
    };

    ExperimentResult run_experiment(const ExperimentConfig &cfg);

    // Writes every artifact plus its metadata sidecar; on any failure the files
    // already written by this call are removed before rethrowing.
    std::vector<std::filesystem::path> write_artifacts(const ExperimentResult &res, const ExperimentConfig &cfg,
                                                       const std::filesystem::path &dir);
}

#endif
