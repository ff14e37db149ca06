// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_ANALYSIS_HPP
#define NFSEC_ANALYSIS_HPP

#include "nfsec/numerics.hpp"
#include "nfsec/precoding.hpp"
#include "nfsec/scenario.hpp"

#include <span>
#include <string>
#include <vector>

namespace nfsec
{
    using State = PrecoderState<double>;

    // E[W(k) e_m e_m^H W(k)^H] over the AN draw.
    CMatrix avg_outer_product(const State &state, Eigen::Index m);

    // Expected received powers at one position, split as in the average SINR ratio.
    struct PowerTerms
    {
        double desired = 0;      // E|h^H F W(k) e_m|^2
        double interference = 0; // sum over p != m of E|h^H F W(k) e_p|^2
    };

    PowerTerms avg_power_los(const CVector &h, const State &state, Eigen::Index m);
    PowerTerms avg_power_multipath(const CMatrix &R, const CVector &h_bar, const State &state, Eigen::Index m);

    double avg_sinr_los(const CVector &h, const State &state, Eigen::Index m, double noise_power);
    double avg_sinr_multipath(const CMatrix &R, const CVector &h_bar, const State &state, Eigen::Index m,
                              double noise_power);

    double rate_upper(double sinr);
    double secrecy_capacity_approx(double user_sinr, double eve_sinr);

    // Per-position, per-stream average SINR with the matching rate bound and the
    // secrecy capacity estimate against the stream's own user.
    struct SinrReport
    {
        Eigen::MatrixXd sinr;     // positions x streams
        Eigen::MatrixXd rate;     // log2(1 + sinr)
        Eigen::MatrixXd secrecy;  // max(log2(1 + beta_m^2 / sigma^2) - rate, 0)
    };

    SinrReport sinr_report(const ArrayGeometry &geom, const State &state, std::span<const Position3> positions,
                           double noise_power);

    // Smallest xi for which the approximate secrecy capacity against h_eve reaches delta.
    double xi_for_target_secrecy(double delta, const CVector &h_eve, const State &state, Eigen::Index m,
                                 double noise_power);

    struct EveSinrParams
    {
        CVector u;          // P_null F^H h_eve
        CVector v;          // W_static^H F^H h_eve, conjugated: v_p = h^H F W_static e_p
        double lambda1 = 0; // non-centrality of the desired-stream term
        double lambda2 = 0; // non-centrality of the interfering streams
        Eigen::Index m = 0;
    };

    EveSinrParams eve_sinr_params(const CVector &h_eve, const State &state, Eigen::Index m);

    double user_sinr_pdf(double y, double beta, double noise_power);

    // Probability that the instantaneous secrecy capacity falls below rate_target
    // against a noiseless eavesdropper.
    double secrecy_outage(double rate_target, double beta, double noise_power, const EveSinrParams &params,
                          Eigen::Index M, const QuadratureOptions &quad = {}, const SeriesControl &series = {});

    enum class CellStatus
    {
        Ok,
        DegenerateNullSpace,
        Coincident,
        SeriesNotConverged,
        QuadratureFailure,
        Invalid
    };

    std::string to_string(CellStatus s);

    struct SecrecyMap
    {
        std::vector<double> outage;
        std::vector<bool> secure; // outage <= epsilon
        std::vector<CellStatus> status;
    };

    SecrecyMap secrecy_map(const Scenario &scenario, const State &state, Eigen::Index m,
                           std::span<const Position3> grid, double rate_target, double epsilon,
                           const SeriesControl &series = {1e-12, 20000});
}

#endif
