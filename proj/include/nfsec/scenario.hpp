// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_SCENARIO_HPP
#define NFSEC_SCENARIO_HPP

#include "nfsec/geometry.hpp"
#include "nfsec/modulation.hpp"

#include <string>
#include <vector>

namespace nfsec
{
    // The single experiment input record.
    struct Scenario
    {
        ArrayGeometry geometry;
        std::vector<Position3> users;
        std::vector<Position3> eavesdroppers;
        std::vector<Scatterer> scatterers;
        int n_rf = 1;
        double noise_power = 1.0;    // sigma^2 [W]
        double transmit_power = 1.0; // P_t [W]
        std::vector<double> symbol_gains;            // beta_m
        std::vector<ModulationScheme> modulations;   // per user

        Eigen::Index user_count() const { return Eigen::Index(users.size()); }

        RVector beta() const { return Eigen::Map<const RVector>(symbol_gains.data(), Eigen::Index(symbol_gains.size())); }

        // Collects every violated invariant into one ValidationError.
        void validate() const
        {
            std::vector<std::string> issues;
            try
            {
                geometry.validate();
            }
            catch (const ValidationError &e)
            {
                issues.emplace_back(e.what());
            }
            const auto m = users.size();
            if (m < 1)
                issues.emplace_back("at least one user required");
            if (n_rf < int(m))
                issues.emplace_back("n_rf (" + std::to_string(n_rf) + ") must be >= number of users (" + std::to_string(m) + ")");
            if (n_rf > geometry.element_count())
                issues.emplace_back("n_rf exceeds the number of array elements");
            if (!(noise_power > 0.0))
                issues.emplace_back("noise power must be positive");
            if (!(transmit_power > 0.0))
                issues.emplace_back("transmit power must be positive");
            if (symbol_gains.size() != m)
                issues.emplace_back("one symbol gain per user required");
            for (double b : symbol_gains)
                if (!(b > 0.0))
                {
                    issues.emplace_back("symbol gains must be positive");
                    break;
                }
            if (!modulations.empty() && modulations.size() != m)
                issues.emplace_back("one modulation per user required");
            for (const auto &s : scatterers)
                if (!(s.variance > 0.0))
                {
                    issues.emplace_back("scatterer variances must be positive");
                    break;
                }
            if (!issues.empty())
            {
                std::string msg = "invalid scenario:";
                for (const auto &i : issues)
                    msg += "\n  - " + i;
                throw ValidationError(msg);
            }
        }

        ModulationScheme modulation(Eigen::Index m) const
        {
            return modulations.empty() ? ModulationScheme::qpsk() : modulations[std::size_t(m)];
        }
    };

    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}

#endif
