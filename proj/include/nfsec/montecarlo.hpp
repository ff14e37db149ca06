// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_MONTECARLO_HPP
#define NFSEC_MONTECARLO_HPP

#include "nfsec/analysis.hpp"
#include "nfsec/modulation.hpp"
#include "nfsec/precoding.hpp"
#include "nfsec/scenario.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nfsec
{
    // What a single receiver sees of the slot precoders: e_p(k) = v_p + xi(k) u^H W_AN(k) e_p.
    struct LinkProjection
    {
        CVector v; // h^H F W_static e_p
        CVector u; // P_null F^H h
    };

    LinkProjection project_link(const CVector &h, const State &state);

    // Reproducible sequence of slot precoders. With a transmit power the slot xi is
    // the per-draw exact root; otherwise the state's fixed xi is used.
    class SlotSequence
    {
    public:
        SlotSequence(const State &state, std::uint64_t an_seed, std::optional<double> exact_power = std::nullopt);

        CMatrix an(std::size_t k) const;
        double xi(const CMatrix &W_AN) const;
        SlotPrecoder<double> precoder(std::size_t k) const;

        // Effective per-stream gains of one receiver for this slot's draw.
        CVector gains(const LinkProjection &link, const CMatrix &W_AN, double xi) const;

        const State &state() const { return state_; }

    private:
        State state_;
        std::uint64_t seed_;
        std::optional<double> power_;
        CMatrix an_gram_;  // P F^H F P
        CMatrix cross_;    // W_static^H F^H F P
        double static_power_ = 0;
    };

    // y(k) = h^H F W(k) x(k) + n(k); symbols is M x K, one column per slot.
    CVector received_signal(const CVector &h, const State &state, const CMatrix &symbols,
                            std::span<const SlotPrecoder<double>> slots, double noise_power, Rng &rng);

    struct LinkCell
    {
        Eigen::Index position = 0;
        Eigen::Index stream = 0;
        std::uint64_t bit_errors = 0;
        std::uint64_t bits = 0;
        double ber = 0;
        double ber_half_width = 0; // 95% normal approximation
        bool low_confidence = false; // fewer than 100 errors
        double sinr = 0;             // ratio of slot-averaged powers
        double symbol_accuracy = 0;  // fraction of correctly detected symbols
    };

    struct LinkResult
    {
        std::vector<LinkCell> cells; // position-major, then stream
        std::size_t slots = 0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
    };

    struct BerOptions
    {
        std::optional<double> exact_power; // per-slot exact xi instead of the state's fixed xi
        double noise_power = -1;           // negative: use the scenario's
    };

    LinkResult estimate_ber(const Scenario &scenario, const State &state, std::span<const CVector> channels,
                            std::span<const Eigen::Index> streams, std::size_t K, std::size_t trials,
                            std::uint64_t seed, const BerOptions &opt = {});

    LinkResult estimate_ber(const Scenario &scenario, const State &state, std::span<const Position3> positions,
                            std::span<const Eigen::Index> streams, std::size_t K, std::size_t trials,
                            std::uint64_t seed, const BerOptions &opt = {});

    // Slot average of log2(1 + SINR_user) - log2(1 + SINR_eve), clamped at zero afterwards.
    double empirical_secrecy_rate(const CVector &h_user, const CVector &h_eve, const State &state, Eigen::Index m,
                                  double noise_power, std::size_t K, std::uint64_t seed, double eve_noise = 0.0);

    // Against the strongest of several eavesdroppers in each slot.
    double empirical_secrecy_rate(const CVector &h_user, std::span<const CVector> h_eves, const State &state,
                                  Eigen::Index m, double noise_power, std::size_t K, std::uint64_t seed,
                                  double eve_noise = 0.0);

    double empirical_secrecy_rate(const Scenario &scenario, const State &state, Eigen::Index m, const Position3 &eve,
                                  std::size_t K, std::uint64_t seed, double eve_noise = 0.0);

    // Outage frequencies, rows = eavesdroppers, columns = target rates.
    Eigen::MatrixXd empirical_outage(const CVector &h_user, std::span<const CVector> h_eves, const State &state,
                                     Eigen::Index m, double noise_power, std::span<const double> rate_targets,
                                     std::size_t K, std::uint64_t seed, double eve_noise = 0.0);

    double empirical_outage(const Scenario &scenario, const State &state, Eigen::Index m, const Position3 &eve,
                            double rate_target, std::size_t K, std::uint64_t seed);

    // Uniform point of the unit ball.
    Position3 unit_ball_sample(Rng &rng);

    std::vector<Position3> perturb_positions(std::span<const Position3> users, double delta, Rng &rng);

    // Plane wave from the direction of r with the array-centre path loss on every element.
    CVector far_field_channel_variant(const ArrayGeometry &geom, const Position3 &r);
}

#endif
