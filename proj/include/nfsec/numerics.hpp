// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_NUMERICS_HPP
#define NFSEC_NUMERICS_HPP

#include "nfsec/errors.hpp"
#include "nfsec/rng.hpp"

#include <functional>
#include <vector>

namespace nfsec
{
    // Truncation control of the doubly non-central F double series.
    struct SeriesControl
    {
        double tolerance = 1e-12; // relative size of the smallest retained term
        int max_index = 800;      // cap on the total series index a + b
    };

    double log_gamma(double x);
    double beta_fn(double a, double b);

    // Upper-tail standard normal probability.
    double q_function(double x);

    // Density of (M - 1) X1 / X2 with X1 ~ chi2'(2, lambda1), X2 ~ chi2'(2(M - 1), lambda2),
    // i.e. the doubly non-central F(2, 2(M - 1)) density. Summed in log space over a
    // jointly log-concave index lattice, walking outward from each row's mode.
    double dncf_scaled_pdf(double s, double lambda1, double lambda2, int M, const SeriesControl &ctrl = {});

    // Points spanning the bulk of that density, for seeding quadrature.
    std::vector<double> dncf_breakpoints(double lambda1, double lambda2, int M);

    // Sum of dof squared unit-variance normals with total non-centrality lambda.
    double sample_ncx2(int dof, double lambda, Rng &rng);

    struct QuadratureOptions
    {
        double tolerance = 1e-8;     // relative
        double abs_tolerance = 1e-13;
        int max_subdivisions = 4000;
        std::vector<double> breakpoints; // extra initial cuts in s, e.g. around a narrow peak
    };

    // Adaptive Gauss-Kronrod (7/15) over [0, inf) after s = t / (1 - t).
    double integrate_semi_infinite(const std::function<double(double)> &f, const QuadratureOptions &opt);

    inline double integrate_semi_infinite(const std::function<double(double)> &f, double tol)
    {
        QuadratureOptions opt;
        opt.tolerance = tol;
        return integrate_semi_infinite(f, opt);
    }
}

#endif
