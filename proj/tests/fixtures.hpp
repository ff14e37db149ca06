// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_TEST_FIXTURES_HPP
#define NFSEC_TEST_FIXTURES_HPP

#include "nfsec/analysis.hpp"
#include "nfsec/geometry.hpp"
#include "nfsec/precoding.hpp"

#include <random>
#include <vector>

namespace nfsec::testing
{
    // Random points in front of the array, between 0.1 and 0.7 d_F away.
    inline std::vector<Position3> random_positions(const ArrayGeometry &g, int count, Rng &rng)
    {
        const double dF = fraunhofer_distance(g);
        std::uniform_real_distribution<double> u(-0.5, 0.5), z(0.1, 0.7);
        std::vector<Position3> out;
        for (int i = 0; i < count; ++i)
            out.emplace_back(u(rng) * dF, u(rng) * dF, z(rng) * dF);
        return out;
    }

    struct Instance
    {
        ArrayGeometry geom;
        std::vector<Position3> users;
        CMatrix H;
        State state;
    };

    inline Instance random_instance(int rows, int cols, int n_rf, int M, Rng &rng, bool digital = false)
    {
        Instance in;
        in.geom = ArrayGeometry::half_wavelength(rows, cols, 28e9);
        in.users = random_positions(in.geom, M, rng);
        in.H = channel_matrix(in.geom, std::span<const Position3>(in.users));
        std::uniform_real_distribution<double> b(0.5, 2.0);
        RVector beta(M);
        for (int m = 0; m < M; ++m)
            beta(m) = 1e-6 * b(rng);
        const AnalogPrecoder<double> F = digital ? fully_digital(in.H.rows()) : design_analog(in.H, n_rf);
        in.state = make_state(F, in.H, beta);
        return in;
    }
}

#endif
