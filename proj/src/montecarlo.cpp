// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/montecarlo.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace nfsec
{
    LinkProjection project_link(const CVector &h, const State &state)
    {
        if (h.size() != state.n_antennas())
            throw DomainError("channel length does not match the array");
        const CVector g = state.F.adjoint() * h;
        return {(g.adjoint() * state.W_static).transpose(), state.P_null * g};
    }

    SlotSequence::SlotSequence(const State &state, std::uint64_t an_seed, std::optional<double> exact_power)
        : state_(state), seed_(an_seed), power_(exact_power)
    {
        if (power_)
        {
            const CMatrix FF = state_.F.adjoint() * state_.F;
            an_gram_ = state_.P_null * FF * state_.P_null;
            cross_ = state_.W_static.adjoint() * FF * state_.P_null;
            static_power_ = (state_.W_static.adjoint() * FF * state_.W_static).trace().real();
            if (!(*power_ > static_power_))
                throw Infeasible("transmit power does not exceed the static ZF power");
        }
    }

    CMatrix SlotSequence::an(std::size_t k) const
    {
        return slot_an(seed_, k, state_.n_rf(), state_.user_count());
    }

    double SlotSequence::xi(const CMatrix &W_AN) const
    {
        if (!power_)
            return state_.xi;
        const double A = (W_AN.adjoint() * an_gram_ * W_AN).trace().real();
        const double B = 2.0 * (cross_ * W_AN).trace().real();
        const double C = static_power_ - *power_;
        if (!(A > 0.0))
            return 0.0;
        return -2.0 * C / (B + std::sqrt(B * B - 4.0 * A * C));
    }

    SlotPrecoder<double> SlotSequence::precoder(std::size_t k) const
    {
        const CMatrix W_AN = an(k);
        return slot_precoder(state_.with_xi(xi(W_AN)), W_AN, k);
    }

    CVector SlotSequence::gains(const LinkProjection &link, const CMatrix &W_AN, double x) const
    {
        CVector e = link.v;
        if (x != 0.0)
            e.noalias() += x * (link.u.adjoint() * W_AN).transpose();
        return e;
    }

    CVector received_signal(const CVector &h, const State &state, const CMatrix &symbols,
                            std::span<const SlotPrecoder<double>> slots, double noise_power, Rng &rng)
    {
        if (symbols.cols() != Eigen::Index(slots.size()) || symbols.rows() != state.user_count())
            throw DomainError("symbol block must be M x K with one column per slot precoder");
        if (!(noise_power >= 0.0))
            throw DomainError("noise power must be non-negative");
        const CVector g = state.F.adjoint() * h;
        CVector y(symbols.cols());
        for (Eigen::Index k = 0; k < symbols.cols(); ++k)
        {
            y(k) = (g.adjoint() * slots[std::size_t(k)].W * symbols.col(k)).value();
            if (noise_power > 0.0)
                y(k) += complex_normal(rng, noise_power);
        }
        return y;
    }

    namespace
    {
        std::uint64_t an_root(std::uint64_t seed, std::size_t trial)
        {
            return derive_seed(seed, Stream::ArtificialNoise, trial);
        }

        cplx detection_gain(cplx v)
        {
            return std::abs(v) > 0.0 ? v : cplx(1.0, 0.0);
        }
    }

    LinkResult estimate_ber(const Scenario &scenario, const State &state, std::span<const CVector> channels,
                            std::span<const Eigen::Index> streams, std::size_t K, std::size_t trials,
                            std::uint64_t seed, const BerOptions &opt)
    {
        if (K < 1 || trials < 1)
            throw DomainError("estimate_ber needs at least one slot and one trial");
        const double noise = opt.noise_power >= 0.0 ? opt.noise_power : scenario.noise_power;
        const Eigen::Index M = state.user_count();
        for (Eigen::Index s : streams)
            if (s < 0 || s >= M)
                throw DomainError("stream index out of range");

        std::vector<LinkProjection> links;
        links.reserve(channels.size());
        for (const CVector &h : channels)
            links.push_back(project_link(h, state));

        const std::size_t P = channels.size();
        const std::size_t S = streams.size();
        std::vector<std::uint64_t> errors(P * S, 0), symbol_hits(P * S, 0);
        std::vector<double> desired(P * S, 0.0), interference(P * S, 0.0);
        std::vector<ModulationScheme> mods;
        for (Eigen::Index p = 0; p < M; ++p)
            mods.push_back(scenario.modulation(p));

        for (std::size_t t = 0; t < trials; ++t)
        {
            const SlotSequence seq(state, an_root(seed, t), opt.exact_power);
            Rng sym_rng = make_rng(seed, Stream::Symbols, t);
            std::vector<SymbolBlock> blocks;
            for (Eigen::Index p = 0; p < M; ++p)
                blocks.push_back(gen_symbols(mods[std::size_t(p)], K, sym_rng));
            std::vector<Rng> noise_rng;
            for (std::size_t i = 0; i < P; ++i)
                noise_rng.push_back(make_rng(seed, Stream::Noise, t * P + i));
            // noise is drawn in the frame of the first detected stream's gain so that
            // common random numbers stay aligned when only the channel model changes
            std::vector<cplx> frame(P, cplx(1.0));
            for (std::size_t i = 0; i < P && S > 0; ++i)
            {
                const cplx g = detection_gain(links[i].v(streams[0]));
                frame[i] = g / std::abs(g);
            }

            // y[i](k) for every receiver
            std::vector<CVector> y(P, CVector(Eigen::Index(K)));
            std::vector<Eigen::MatrixXd> powers(P, Eigen::MatrixXd::Zero(M, 1));
            CVector x(M);
            for (std::size_t k = 0; k < K; ++k)
            {
                const CMatrix W_AN = seq.an(k);
                const double xk = seq.xi(W_AN);
                for (Eigen::Index p = 0; p < M; ++p)
                    x(p) = blocks[std::size_t(p)].symbols(Eigen::Index(k));
                for (std::size_t i = 0; i < P; ++i)
                {
                    const CVector e = seq.gains(links[i], W_AN, xk);
                    cplx yk = (e.transpose() * x).value();
                    if (noise > 0.0)
                        yk += frame[i] * complex_normal(noise_rng[i], noise);
                    y[i](Eigen::Index(k)) = yk;
                    powers[i] += e.cwiseAbs2().cast<double>();
                }
            }
            for (std::size_t i = 0; i < P; ++i)
                for (std::size_t j = 0; j < S; ++j)
                {
                    const Eigen::Index m = streams[j];
                    const auto &mod = mods[std::size_t(m)];
                    const std::vector<int> labels = detect(y[i], mod, detection_gain(links[i].v(m)));
                    const auto &truth = blocks[std::size_t(m)].labels;
                    std::uint64_t err = 0, hits = 0;
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        err += std::uint64_t(std::popcount(unsigned(labels[k] ^ truth[k])));
                        hits += labels[k] == truth[k];
                    }
                    errors[i * S + j] += err;
                    symbol_hits[i * S + j] += hits;
                    const double total = powers[i].sum();
                    desired[i * S + j] += powers[i](m);
                    interference[i * S + j] += total - powers[i](m);
                }
        }

        LinkResult res;
        res.slots = K;
        res.trials = trials;
        res.seed = seed;
        const double n_sym = double(K * trials);
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < S; ++j)
            {
                LinkCell c;
                c.position = Eigen::Index(i);
                c.stream = streams[j];
                c.bits = std::uint64_t(n_sym) * std::uint64_t(mods[std::size_t(c.stream)].bits_per_symbol());
                c.bit_errors = errors[i * S + j];
                c.ber = double(c.bit_errors) / double(c.bits);
                c.ber_half_width = 1.96 * std::sqrt(c.ber * (1.0 - c.ber) / double(c.bits));
                c.low_confidence = c.bit_errors < 100;
                c.sinr = (desired[i * S + j] / n_sym) / (interference[i * S + j] / n_sym + noise);
                c.symbol_accuracy = double(symbol_hits[i * S + j]) / n_sym;
                res.cells.push_back(c);
            }
        return res;
    }

    LinkResult estimate_ber(const Scenario &scenario, const State &state, std::span<const Position3> positions,
                            std::span<const Eigen::Index> streams, std::size_t K, std::size_t trials,
                            std::uint64_t seed, const BerOptions &opt)
    {
        std::vector<CVector> channels;
        channels.reserve(positions.size());
        for (const Position3 &r : positions)
            channels.push_back(los_channel(scenario.geometry, r));
        return estimate_ber(scenario, state, std::span<const CVector>(channels), streams, K, trials, seed, opt);
    }

    namespace
    {
        double instantaneous_sinr(const CVector &e, Eigen::Index m, double noise_sample)
        {
            const double d = std::norm(e(m));
            return d / (e.squaredNorm() - d + noise_sample);
        }

        double noise_draw(Rng &rng, double variance)
        {
            return variance > 0.0 ? std::norm(complex_normal(rng, variance)) : 0.0;
        }
    }

    double empirical_secrecy_rate(const CVector &h_user, const CVector &h_eve, const State &state, Eigen::Index m,
                                  double noise_power, std::size_t K, std::uint64_t seed, double eve_noise)
    {
        return empirical_secrecy_rate(h_user, std::span<const CVector>(&h_eve, 1), state, m, noise_power, K, seed,
                                      eve_noise);
    }

    double empirical_secrecy_rate(const CVector &h_user, std::span<const CVector> h_eves, const State &state,
                                  Eigen::Index m, double noise_power, std::size_t K, std::uint64_t seed,
                                  double eve_noise)
    {
        if (K < 1)
            throw DomainError("need at least one slot");
        if (h_eves.empty())
            throw DomainError("need at least one eavesdropper");
        const SlotSequence seq(state, an_root(seed, 0));
        const LinkProjection lu = project_link(h_user, state);
        std::vector<LinkProjection> le;
        for (const CVector &h : h_eves)
            le.push_back(project_link(h, state));
        Rng nu = make_rng(seed, Stream::Noise, 0);
        Rng ne = make_rng(seed, Stream::Noise, 1);
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            const CMatrix W_AN = seq.an(k);
            const double x = seq.xi(W_AN);
            const double su = instantaneous_sinr(seq.gains(lu, W_AN, x), m, noise_draw(nu, noise_power));
            double se = 0.0;
            for (const LinkProjection &p : le)
                se = std::max(se, instantaneous_sinr(seq.gains(p, W_AN, x), m, noise_draw(ne, eve_noise)));
            acc += std::log2(1.0 + su) - std::log2(1.0 + se);
        }
        return std::max(acc / double(K), 0.0);
    }

    double empirical_secrecy_rate(const Scenario &scenario, const State &state, Eigen::Index m, const Position3 &eve,
                                  std::size_t K, std::uint64_t seed, double eve_noise)
    {
        return empirical_secrecy_rate(los_channel(scenario.geometry, scenario.users.at(std::size_t(m))),
                                      los_channel(scenario.geometry, eve), state, m, scenario.noise_power, K, seed,
                                      eve_noise);
    }

    Eigen::MatrixXd empirical_outage(const CVector &h_user, std::span<const CVector> h_eves, const State &state,
                                     Eigen::Index m, double noise_power, std::span<const double> rate_targets,
                                     std::size_t K, std::uint64_t seed, double eve_noise)
    {
        if (K < 1)
            throw DomainError("need at least one slot");
        const SlotSequence seq(state, an_root(seed, 0));
        const LinkProjection lu = project_link(h_user, state);
        std::vector<LinkProjection> le;
        for (const CVector &h : h_eves)
            le.push_back(project_link(h, state));
        Rng nu = make_rng(seed, Stream::Noise, 0);
        Rng ne = make_rng(seed, Stream::Noise, 1);
        Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(Eigen::Index(h_eves.size()), Eigen::Index(rate_targets.size()));
        for (std::size_t k = 0; k < K; ++k)
        {
            const CMatrix W_AN = seq.an(k);
            const double x = seq.xi(W_AN);
            const double cu = std::log2(1.0 + instantaneous_sinr(seq.gains(lu, W_AN, x), m, noise_draw(nu, noise_power)));
            for (std::size_t q = 0; q < le.size(); ++q)
            {
                const double ce = std::log2(1.0 + instantaneous_sinr(seq.gains(le[q], W_AN, x), m, noise_draw(ne, eve_noise)));
                for (std::size_t r = 0; r < rate_targets.size(); ++r)
                    if (cu - ce < rate_targets[r])
                        hits(Eigen::Index(q), Eigen::Index(r)) += 1.0;
            }
        }
        return hits / double(K);
    }

    double empirical_outage(const Scenario &scenario, const State &state, Eigen::Index m, const Position3 &eve,
                            double rate_target, std::size_t K, std::uint64_t seed)
    {
        const CVector he = los_channel(scenario.geometry, eve);
        return empirical_outage(los_channel(scenario.geometry, scenario.users.at(std::size_t(m))),
                                std::span<const CVector>(&he, 1), state, m, scenario.noise_power,
                                std::span<const double>(&rate_target, 1), K, seed)(0, 0);
    }

    Position3 unit_ball_sample(Rng &rng)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Position3 d;
        do
            d = Position3(n(rng), n(rng), n(rng));
        while (d.squaredNorm() == 0.0);
        return d.normalized() * std::cbrt(u(rng));
    }

    std::vector<Position3> perturb_positions(std::span<const Position3> users, double delta, Rng &rng)
    {
        if (!(delta >= 0.0))
            throw DomainError("perturbation radius must be non-negative");
        std::vector<Position3> out;
        out.reserve(users.size());
        for (const Position3 &r : users)
            out.push_back(r + delta * unit_ball_sample(rng));
        return out;
    }

    CVector far_field_channel_variant(const ArrayGeometry &geom, const Position3 &r)
    {
        const double dist = r.norm();
        if (!(dist > 0.0))
            throw CoincidentPosition("far-field direction undefined at the array centre");
        const Eigen::Matrix3Xd s = element_position_matrix(geom);
        const Position3 dir = r / dist;
        const double k = geom.wavenumber();
        const double amp = geom.wavelength() / (4.0 * std::numbers::pi * dist);
        CVector h(s.cols());
        for (Eigen::Index n = 0; n < s.cols(); ++n)
            h(n) = std::polar(amp, std::fmod(k * (dist - dir.dot(s.col(n))), 2.0 * std::numbers::pi));
        return h;
    }
}
