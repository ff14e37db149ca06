// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/experiments.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace nfsec
{
    namespace
    {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        using Row = std::vector<CsvValue>;

        std::int64_t i64(std::size_t v) { return std::int64_t(v); }
        std::int64_t i64(Eigen::Index v) { return std::int64_t(v); }

        double to_db(double x) { return 10.0 * std::log10(x); }

        CMatrix user_channels(const Scenario &sc)
        {
            return channel_matrix(sc.geometry, std::span<const Position3>(sc.users));
        }

        RVector beta_for_sinr(const Scenario &sc, double sinr_db)
        {
            return RVector::Constant(sc.user_count(), std::sqrt(sc.noise_power * db_to_linear(sinr_db)));
        }

        std::uint64_t an_seed(const ExperimentConfig &cfg)
        {
            return derive_seed(cfg.seed, Stream::ArtificialNoise, 0);
        }

        // The receivers every position-based artifact reports on.
        struct Receiver
        {
            std::string role;
            std::int64_t index;
            Position3 position;
        };

        std::vector<Receiver> receivers(const ExperimentConfig &cfg)
        {
            std::vector<Receiver> out;
            const Scenario &sc = cfg.scenario;
            for (std::size_t i = 0; i < sc.users.size(); ++i)
                out.push_back({"user", i64(i + 1), sc.users[i]});
            for (std::size_t i = 0; i < sc.eavesdroppers.size(); ++i)
                out.push_back({"eve", i64(i + 1), sc.eavesdroppers[i]});
            for (std::size_t i = 0; i < cfg.probes.size(); ++i)
                out.push_back({"probe", i64(i + 1), cfg.probes[i]});
            return out;
        }

        Row coords(const ExperimentConfig &cfg, const Position3 &r)
        {
            return {r.x() / cfg.dF_unit, r.y() / cfg.dF_unit, r.z() / cfg.dF_unit};
        }

        Row concat(Row a, const Row &b)
        {
            a.insert(a.end(), b.begin(), b.end());
            return a;
        }

        // Normalized static and AN-inclusive gains of stream m at a position.
        std::pair<double, double> stream_gains(const CVector &h, const State &st, Eigen::Index m)
        {
            const LinkProjection link = project_link(h, st);
            const double ref = st.beta(m) * st.beta(m);
            const double stat = std::norm(link.v(m));
            const double an = (link.u.adjoint() * link.u).value().real(); // u = P g, P idempotent
            return {to_db(stat / ref), to_db((st.xi * st.xi * an + stat) / ref)};
        }

        CsvArtifact beampattern(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Design d = design_precoder(cfg, user_channels(sc), sc.beta());
            const State &st = d.state;
            CsvArtifact grid{"beampattern", {"x_dF", "y_dF", "z_dF", "stream", "gain_db", "gain_an_db"}, {}};
            for (const Position3 &r : grid_points(cfg))
            {
                const CVector h = los_channel(sc.geometry, r);
                for (Eigen::Index m = 0; m < st.user_count(); ++m)
                {
                    const auto [g, ga] = stream_gains(h, st, m);
                    grid.add(concat(coords(cfg, r), {i64(m + 1), g, ga}));
                }
            }
            return grid;
        }

        CsvArtifact beampattern_points(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Design d = design_precoder(cfg, user_channels(sc), sc.beta());
            const State &st = d.state;
            CsvArtifact pts{"beampattern_points",
                            {"role", "index", "x_dF", "y_dF", "z_dF", "stream", "gain_db", "gain_an_db", "xi"},
                            {}};
            for (const Receiver &rc : receivers(cfg))
            {
                const CVector h = los_channel(sc.geometry, rc.position);
                for (Eigen::Index m = 0; m < st.user_count(); ++m)
                {
                    const auto [g, ga] = stream_gains(h, st, m);
                    pts.add(concat(concat({rc.role, rc.index}, coords(cfg, rc.position)), {i64(m + 1), g, ga, st.xi}));
                }
            }
            return pts;
        }

        CsvArtifact constellation(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Design d = design_precoder(cfg, user_channels(sc), sc.beta());
            const State &st = d.state;
            const Eigen::Index M = st.user_count();
            const std::size_t K = cfg.slots;
            const SlotSequence seq(st, an_seed(cfg));
            std::vector<SlotPrecoder<double>> slots;
            slots.reserve(K);
            for (std::size_t k = 0; k < K; ++k)
                slots.push_back(seq.precoder(k));
            Rng sym_rng = make_rng(cfg.seed, Stream::Symbols, 0);
            std::vector<SymbolBlock> blocks;
            CMatrix X(M, Eigen::Index(K));
            for (Eigen::Index p = 0; p < M; ++p)
            {
                blocks.push_back(gen_symbols(sc.modulation(p), K, sym_rng));
                X.row(p) = blocks.back().symbols.transpose();
            }
            CsvArtifact out{"constellation", {"role", "index", "stream", "slot", "re", "im", "label"}, {}};
            const auto rx = receivers(cfg);
            for (std::size_t i = 0; i < rx.size(); ++i)
            {
                const Eigen::Index m = rx[i].role == "user" ? Eigen::Index(rx[i].index - 1) : cfg.stream;
                const CVector h = los_channel(sc.geometry, rx[i].position);
                Rng noise = make_rng(cfg.seed, Stream::Noise, i);
                const CVector y = received_signal(h, st, X, slots, sc.noise_power, noise);
                const cplx v = project_link(h, st).v(m);
                const cplx gain = std::abs(v) > 0.0 ? v : cplx(1.0, 0.0);
                for (std::size_t k = 0; k < K; ++k)
                {
                    const cplx z = y(Eigen::Index(k)) / gain;
                    out.add({rx[i].role, rx[i].index, i64(m + 1), i64(k), z.real(), z.imag(),
                             std::int64_t(blocks[std::size_t(m)].labels[k])});
                }
            }
            return out;
        }

        Row ber_fields(const LinkCell &c)
        {
            return {c.ber, c.ber_half_width, std::int64_t(c.bit_errors), std::int64_t(c.bits),
                    std::int64_t(c.low_confidence), to_db(c.sinr)};
        }

        const std::vector<std::string> ber_columns = {"ber", "ber_half_width", "bit_errors", "bits", "low_confidence",
                                                      "sinr_db"};

        std::vector<std::string> columns(std::vector<std::string> head, const std::vector<std::string> &tail)
        {
            head.insert(head.end(), tail.begin(), tail.end());
            return head;
        }

        std::vector<Eigen::Index> all_streams(Eigen::Index M)
        {
            std::vector<Eigen::Index> s(static_cast<std::size_t>(M));
            std::iota(s.begin(), s.end(), Eigen::Index(0));
            return s;
        }

        CsvArtifact ber_grid(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Design d = design_precoder(cfg, user_channels(sc), sc.beta());
            const auto pts = grid_points(cfg);
            const auto streams = all_streams(d.state.user_count());
            const LinkResult res = estimate_ber(sc, d.state, std::span<const Position3>(pts), streams, cfg.slots,
                                                cfg.trials, cfg.seed);
            CsvArtifact out{"ber_grid", columns({"x_dF", "y_dF", "z_dF", "stream"}, ber_columns), {}};
            for (const LinkCell &c : res.cells)
                out.add(concat(concat(coords(cfg, pts[std::size_t(c.position)]), {i64(c.stream + 1)}), ber_fields(c)));
            return out;
        }

        CsvArtifact ber_sweep(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const CMatrix H = user_channels(sc);
            const auto rx = receivers(cfg);
            std::vector<CVector> channels;
            for (const Receiver &r : rx)
                channels.push_back(los_channel(sc.geometry, r.position));
            CsvArtifact out{"ber_sweep",
                            columns({"target_sinr_db", "role", "index", "stream"},
                                    columns(ber_columns, {"avg_sinr_db", "ber_theory_qpsk"})),
                            {}};
            for (double s : cfg.sinr_db)
            {
                const Design d = design_precoder(cfg, H, beta_for_sinr(sc, s));
                const auto streams = all_streams(d.state.user_count());
                const LinkResult res = estimate_ber(sc, d.state, std::span<const CVector>(channels), streams,
                                                    cfg.slots, cfg.trials, cfg.seed);
                for (const LinkCell &c : res.cells)
                {
                    const Receiver &r = rx[std::size_t(c.position)];
                    if (r.role == "user" && r.index - 1 != c.stream)
                        continue;
                    const double avg = avg_sinr_los(channels[std::size_t(c.position)], d.state, c.stream,
                                                    sc.noise_power);
                    const bool qpsk = sc.modulation(c.stream) == ModulationScheme::qpsk();
                    out.add(concat(concat({s, r.role, r.index, i64(c.stream + 1)}, ber_fields(c)),
                                   {to_db(avg), qpsk ? q_function(std::sqrt(avg)) : nan}));
                }
            }
            return out;
        }

        CsvArtifact same_direction(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Eigen::Index u = cfg.ray_user;
            const Position3 anchor = sc.users[std::size_t(u)];
            CsvArtifact out{"same_direction", columns({"scale", "distance_m", "model"}, ber_columns), {}};
            const std::vector<Eigen::Index> stream{u};
            for (const std::string model : {"near", "far"})
            {
                const bool far = model == "far";
                auto channel = [&](const Position3 &r)
                { return far ? far_field_channel_variant(sc.geometry, r) : CVector(los_channel(sc.geometry, r)); };
                CMatrix H(sc.geometry.element_count(), sc.user_count());
                for (Eigen::Index m = 0; m < sc.user_count(); ++m)
                    H.col(m) = channel(sc.users[std::size_t(m)]);
                const Design d = design_precoder(cfg, H, sc.beta());
                std::vector<CVector> eves;
                for (double s : cfg.ray_scales)
                    eves.push_back(channel(s * anchor));
                const LinkResult res = estimate_ber(sc, d.state, std::span<const CVector>(eves), stream, cfg.slots,
                                                    cfg.trials, cfg.seed);
                for (const LinkCell &c : res.cells)
                {
                    const double s = cfg.ray_scales[std::size_t(c.position)];
                    out.add(concat({s, s * anchor.norm(), std::string(model)}, ber_fields(c)));
                }
            }
            return out;
        }

        CsvArtifact sumrate_multipath(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const ArrayGeometry &g = sc.geometry;
            const Eigen::Index M = sc.user_count();
            std::vector<int> counts = cfg.path_counts;
            if (counts.empty())
                for (std::size_t l = 0; l <= sc.scatterers.size(); ++l)
                    counts.push_back(int(l));
            for (int L : counts)
                if (L < 0 || std::size_t(L) > sc.scatterers.size())
                    throw ValidationError("path count " + std::to_string(L) + " exceeds the scatterer list");

            std::vector<CVector> scat_ch;
            for (const Scatterer &s : sc.scatterers)
                scat_ch.push_back(los_channel(g, s.position));
            const CMatrix los = user_channels(sc);

            std::vector<double> sum(counts.size(), 0.0), sum2(counts.size(), 0.0), eve_sum(counts.size(), 0.0);
            for (std::size_t dr = 0; dr < cfg.draws; ++dr)
            {
                Rng rng = make_rng(cfg.seed, Stream::Channel, dr);
                // one reflection coefficient per (user, scatterer), shared by every L
                Eigen::MatrixXcd coeff(M, Eigen::Index(sc.scatterers.size()));
                for (Eigen::Index m = 0; m < M; ++m)
                    for (std::size_t l = 0; l < sc.scatterers.size(); ++l)
                        coeff(m, Eigen::Index(l)) = complex_normal(rng, sc.scatterers[l].variance) *
                                                    scatterer_link_gain(sc.scatterers[l], sc.users[std::size_t(m)], g);
                for (std::size_t c = 0; c < counts.size(); ++c)
                {
                    CMatrix H = los;
                    for (Eigen::Index m = 0; m < M; ++m)
                        for (int l = 0; l < counts[c]; ++l)
                            H.col(m) += coeff(m, l) * scat_ch[std::size_t(l)];
                    const Design d = design_precoder(cfg, H, sc.beta());
                    double rate = 0.0;
                    for (Eigen::Index m = 0; m < M; ++m)
                        rate += rate_upper(avg_sinr_los(H.col(m), d.state, m, sc.noise_power));
                    double eve_rate = 0.0;
                    for (const Position3 &e : sc.eavesdroppers)
                    {
                        CMatrix R = CMatrix::Zero(g.element_count(), g.element_count());
                        const std::vector<Scatterer> used(sc.scatterers.begin(), sc.scatterers.begin() + counts[c]);
                        if (counts[c] > 0)
                            R = multipath_covariance(g, e, std::span<const Scatterer>(used));
                        const CVector hbar = los_channel(g, e);
                        for (Eigen::Index m = 0; m < M; ++m)
                            eve_rate += rate_upper(avg_sinr_multipath(R, hbar, d.state, m, sc.noise_power));
                    }
                    sum[c] += rate;
                    sum2[c] += rate * rate;
                    eve_sum[c] += eve_rate;
                }
            }
            CsvArtifact out{"sumrate_multipath",
                            {"paths", "user_sum_rate", "user_sum_rate_stderr", "eve_sum_rate", "draws"},
                            {}};
            const double n = double(cfg.draws);
            for (std::size_t c = 0; c < counts.size(); ++c)
            {
                const double mean = sum[c] / n;
                const double var = n > 1 ? std::max(sum2[c] / n - mean * mean, 0.0) * n / (n - 1) : 0.0;
                out.add({std::int64_t(counts[c]), mean, std::sqrt(var / n), eve_sum[c] / n, i64(cfg.draws)});
            }
            return out;
        }

        // Mean transmit power of a fixed-xi design over AN draws.
        double mean_power(const State &st)
        {
            return st.static_power() +
                   st.xi * st.xi * double(st.user_count()) * (st.P_null * (st.F.adjoint() * st.F)).trace().real();
        }

        CsvArtifact secrecy_rate_pt(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const CMatrix H = user_channels(sc);
            const RVector unit = RVector::Ones(sc.user_count());
            const double share = cfg.power.static_share.value_or(0.8);
            CsvArtifact out{"secrecy_rate_sweep",
                            {"pt_dbm", "user", "proposed", "zf_power_matched", "mean_power_w", "xi"},
                            {}};
            if (sc.eavesdroppers.empty())
                throw ValidationError("secrecy-rate sweep needs at least one eavesdropper");
            std::vector<CVector> eves;
            for (const Position3 &e : sc.eavesdroppers)
                eves.push_back(los_channel(sc.geometry, e));
            for (double pt_dbm : cfg.sweep.values)
            {
                ExperimentConfig c = cfg;
                c.power.transmit_dbm = pt_dbm;
                c.power.static_share = share;
                const State st = design_precoder(c, H, unit).state;
                const double power = mean_power(st);
                const State zf = st.with_beta(st.beta * std::sqrt(power / st.static_power())).with_xi(0.0);
                for (Eigen::Index m = 0; m < sc.user_count(); ++m)
                {
                    const CVector hu = H.col(m);
                    const double prop = empirical_secrecy_rate(hu, std::span<const CVector>(eves), st, m,
                                                               sc.noise_power, cfg.slots, cfg.seed, sc.noise_power);
                    const double base_rate = empirical_secrecy_rate(hu, std::span<const CVector>(eves), zf, m,
                                                                    sc.noise_power, cfg.slots, cfg.seed,
                                                                    sc.noise_power);
                    out.add({pt_dbm, i64(m + 1), prop, base_rate, power, st.xi});
                }
            }
            return out;
        }

        CsvArtifact secrecy_rate_delta(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const CMatrix H_true = user_channels(sc);
            const Eigen::Index M = sc.user_count();
            std::vector<CVector> true_ch;
            for (Eigen::Index m = 0; m < M; ++m)
                true_ch.push_back(H_true.col(m));
            std::vector<CVector> eve_ch;
            for (const Position3 &e : sc.eavesdroppers)
                eve_ch.push_back(los_channel(sc.geometry, e));
            const auto streams = all_streams(M);

            // offsets in the unit ball, shared by every radius
            std::vector<std::vector<Position3>> offsets(cfg.trials);
            for (std::size_t t = 0; t < cfg.trials; ++t)
            {
                Rng rng = make_rng(cfg.seed, Stream::Perturbation, t);
                for (Eigen::Index m = 0; m < M; ++m)
                    offsets[t].push_back(unit_ball_sample(rng));
            }
            CsvArtifact out{"secrecy_rate_delta",
                            {"delta_m", "secrecy_rate", "user_ber", "user_ber_half_width", "bit_errors", "bits",
                             "trials"},
                            {}};
            for (double delta : cfg.sweep.values)
            {
                if (!(delta >= 0.0))
                    throw ValidationError("perturbation radius must be non-negative");
                double rate = 0.0;
                std::uint64_t errors = 0, bits = 0;
                for (std::size_t t = 0; t < cfg.trials; ++t)
                {
                    std::vector<Position3> est;
                    for (Eigen::Index m = 0; m < M; ++m)
                        est.push_back(sc.users[std::size_t(m)] + delta * offsets[t][std::size_t(m)]);
                    const Design d = design_precoder(cfg, channel_matrix(sc.geometry, std::span<const Position3>(est)),
                                                     sc.beta());
                    const std::uint64_t trial_seed = derive_seed(cfg.seed, Stream::Oracle, t);
                    for (Eigen::Index m = 0; m < M && !eve_ch.empty(); ++m)
                        rate += empirical_secrecy_rate(true_ch[std::size_t(m)], std::span<const CVector>(eve_ch),
                                                       d.state, m, sc.noise_power, cfg.slots, trial_seed,
                                                       sc.noise_power);
                    const LinkResult res = estimate_ber(sc, d.state, std::span<const CVector>(true_ch), streams,
                                                        cfg.slots, 1, trial_seed);
                    for (const LinkCell &c : res.cells)
                        if (c.position == c.stream)
                        {
                            errors += c.bit_errors;
                            bits += c.bits;
                        }
                }
                const double pairs = double(cfg.trials) * double(M);
                const double ber = bits ? double(errors) / double(bits) : nan;
                const double hw = bits ? 1.96 * std::sqrt(ber * (1.0 - ber) / double(bits)) : nan;
                out.add({delta, eve_ch.empty() ? nan : rate / pairs, ber, hw, std::int64_t(errors), std::int64_t(bits),
                         i64(cfg.trials)});
            }
            return out;
        }

        CsvArtifact outage_curve(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const CMatrix H = user_channels(sc);
            const Eigen::Index m = cfg.stream;
            const double top = *std::max_element(cfg.sinr_db.begin(), cfg.sinr_db.end());
            const Design ref = design_precoder(cfg, H, beta_for_sinr(sc, top));
            const double Pt = ref.transmit_power;
            SeriesControl series;
            series.max_index = cfg.series_cap;
            std::vector<CVector> eves;
            for (const Position3 &e : sc.eavesdroppers)
                eves.push_back(los_channel(sc.geometry, e));
            CsvArtifact out{"outage_curve",
                            {"sinr_db", "eve", "rate_target", "outage", "outage_empirical", "status", "lambda1",
                             "lambda2", "xi"},
                            {}};
            for (double s : cfg.sinr_db)
            {
                const State base = ref.state.with_beta(beta_for_sinr(sc, s));
                const State st = base.with_xi(resolve_xi(cfg, base, Pt));
                const Eigen::MatrixXd emp = empirical_outage(H.col(m), std::span<const CVector>(eves), st, m,
                                                             sc.noise_power, cfg.rate_targets, cfg.slots, cfg.seed);
                for (std::size_t q = 0; q < eves.size(); ++q)
                {
                    EveSinrParams prm;
                    std::string status = "ok";
                    bool degenerate = false;
                    try
                    {
                        prm = eve_sinr_params(eves[q], st, m);
                    }
                    catch (const DegenerateNullSpace &)
                    {
                        degenerate = true;
                        status = to_string(CellStatus::DegenerateNullSpace);
                    }
                    for (std::size_t r = 0; r < cfg.rate_targets.size(); ++r)
                    {
                        double p = 1.0;
                        std::string cell = status;
                        if (!degenerate)
                        {
                            try
                            {
                                p = secrecy_outage(cfg.rate_targets[r], st.beta(m), sc.noise_power, prm,
                                                   st.user_count(), {}, series);
                            }
                            catch (const SeriesNotConverged &)
                            {
                                p = nan;
                                cell = to_string(CellStatus::SeriesNotConverged);
                            }
                            catch (const QuadratureFailure &)
                            {
                                p = nan;
                                cell = to_string(CellStatus::QuadratureFailure);
                            }
                        }
                        out.add({s, i64(q + 1), cfg.rate_targets[r], p, emp(Eigen::Index(q), Eigen::Index(r)), cell,
                                 degenerate ? nan : prm.lambda1, degenerate ? nan : prm.lambda2, st.xi});
                    }
                }
            }
            return out;
        }

        CsvArtifact secrecy_map_artifact(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const Design d = design_precoder(cfg, user_channels(sc), sc.beta());
            const auto pts = grid_points(cfg);
            if (cfg.rate_targets.empty())
                throw ValidationError("secrecy-map needs one rate target");
            SeriesControl series;
            series.max_index = cfg.series_cap;
            const SecrecyMap map = secrecy_map(sc, d.state, cfg.stream, pts, cfg.rate_targets.front(), cfg.epsilon,
                                               series);
            CsvArtifact out{"secrecy_map", {"x_dF", "y_dF", "z_dF", "outage", "secure", "status"}, {}};
            for (std::size_t i = 0; i < pts.size(); ++i)
                out.add(concat(coords(cfg, pts[i]),
                               {map.outage[i], std::int64_t(map.secure[i]), to_string(map.status[i])}));
            return out;
        }

        // Cross-module oracle suite.
        ExperimentResult validate_suite(const ExperimentConfig &cfg)
        {
            const Scenario &sc = cfg.scenario;
            const CMatrix H = user_channels(sc);
            const Design d = design_precoder(cfg, H, sc.beta());
            const State &st = d.state;
            const Eigen::Index M = st.user_count();
            CsvArtifact out{"validate", {"check", "detail", "value", "tolerance", "pass"}, {}};
            bool all = true;
            auto record = [&](const std::string &name, const std::string &detail, double value, double tol)
            {
                const bool ok = std::isfinite(value) && value <= tol;
                all = all && ok;
                out.add({name, detail, value, tol, std::int64_t(ok)});
            };

            // ZF exactness and power feasibility over the slot sequence
            const std::size_t K = std::min<std::size_t>(cfg.slots, 2000);
            const CMatrix B = st.beta.cast<cplx>().asDiagonal();
            const auto bound_run = run_algorithm1(st, d.transmit_power, K, an_seed(cfg), XiRule::Bound);
            const auto exact_run = run_algorithm1(st, d.transmit_power, K, an_seed(cfg), XiRule::Exact);
            double zf = 0.0, over = 0.0, exact_gap = 0.0;
            for (std::size_t k = 0; k < K; ++k)
            {
                zf = std::max(zf, (st.H_M.adjoint() * exact_run.slots[k].W - B).norm() / B.norm());
                over = std::max(over, (st.F * bound_run.slots[k].W).squaredNorm() / d.transmit_power - 1.0);
                exact_gap = std::max(exact_gap, std::abs((st.F * exact_run.slots[k].W).squaredNorm() / d.transmit_power - 1.0));
            }
            record("zf_exactness", "max relative residual over slots", zf, 1e-9);
            record("power_bound", "max relative excess over P_t", std::max(over, 0.0), 0.0);
            record("power_exact", "max relative deviation from P_t", exact_gap, 1e-6);

            // closed-form average outer product against the slot average
            const std::size_t Kp = std::max<std::size_t>(cfg.slots, 20000);
            const SlotSequence seq(st, an_seed(cfg));
            for (Eigen::Index m = 0; m < M; ++m)
            {
                CMatrix acc = CMatrix::Zero(st.n_rf(), st.n_rf());
                for (std::size_t k = 0; k < Kp; ++k)
                {
                    const CVector w = seq.precoder(k).W.col(m);
                    acc.noalias() += w * w.adjoint();
                }
                acc /= double(Kp);
                const CMatrix ref = avg_outer_product(st, m);
                record("avg_outer_product", "stream " + std::to_string(m + 1), (acc - ref).norm() / ref.norm(), 0.02);
            }

            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double s = avg_sinr_los(H.col(m), st, m, sc.noise_power);
                const double target = st.beta(m) * st.beta(m) / sc.noise_power;
                record("user_sinr", "user " + std::to_string(m + 1), std::abs(s / target - 1.0), 1e-6);
            }

            if (M >= 2)
            {
                for (double l1 : {0.0, 2.0, 20.0})
                    for (double l2 : {0.0, 3.0, 30.0})
                    {
                        const double I = integrate_semi_infinite(
                            [&](double s) { return dncf_scaled_pdf(s, l1, l2, int(M)); }, 1e-9);
                        record("dncf_normalization",
                               "lambda1=" + format_value(l1) + " lambda2=" + format_value(l2),
                               std::abs(I - 1.0), 1e-4);
                    }

                SeriesControl series;
                series.max_index = cfg.series_cap;
                std::vector<CVector> eves;
                for (const Position3 &e : sc.eavesdroppers)
                    eves.push_back(los_channel(sc.geometry, e));
                const Eigen::Index m = cfg.stream;
                const Eigen::MatrixXd emp = empirical_outage(H.col(m), std::span<const CVector>(eves), st, m,
                                                             sc.noise_power, cfg.rate_targets, cfg.slots, cfg.seed);
                for (std::size_t q = 0; q < eves.size(); ++q)
                {
                    const EveSinrParams prm = eve_sinr_params(eves[q], st, m);
                    for (std::size_t r = 0; r < cfg.rate_targets.size(); ++r)
                    {
                        const double p = secrecy_outage(cfg.rate_targets[r], st.beta(m), sc.noise_power, prm, M, {},
                                                        series);
                        record("outage_cross_check",
                               "eve " + std::to_string(q + 1) + " R_s=" + format_value(cfg.rate_targets[r]),
                               std::abs(p - emp(Eigen::Index(q), Eigen::Index(r))), 0.01);
                    }
                }
            }
            ExperimentResult res;
            res.artifacts.push_back(std::move(out));
            res.passed = all;
            return res;
        }
    }

    double resolve_transmit_power(const ExperimentConfig &cfg, double static_power)
    {
        const PowerSpec &p = cfg.power;
        if (p.transmit_dbm)
            return dbm_to_watts(*p.transmit_dbm);
        if (p.static_share)
            return static_power / *p.static_share;
        return static_power * p.transmit_factor.value_or(2.0);
    }

    double resolve_xi(const ExperimentConfig &cfg, const State &state, double transmit_power)
    {
        const std::string &rule = cfg.power.xi_rule;
        if (rule == "fixed")
            return cfg.power.xi;
        if (rule == "none")
            return 0.0;
        if (rule == "bound")
            return resolve_xi(state, transmit_power, XiRule::Bound, an_seed(cfg));
        if (rule == "exact")
            return resolve_xi(state, transmit_power, XiRule::Exact, an_seed(cfg));
        return resolve_xi(state, transmit_power, XiRule::Mean, an_seed(cfg));
    }

    Design design_precoder(const ExperimentConfig &cfg, const CMatrix &H_U, const RVector &beta)
    {
        const AnalogPrecoder<double> analog =
            cfg.fully_digital ? fully_digital(H_U.rows()) : design_analog(H_U, Eigen::Index(cfg.scenario.n_rf));
        Design d;
        d.state = make_state(analog, H_U, beta);
        // with both a budget and a share, the symbol gains are rescaled to fit the share
        if (cfg.power.transmit_dbm && cfg.power.static_share)
        {
            const double Pt = dbm_to_watts(*cfg.power.transmit_dbm);
            d.state = d.state.with_beta(beta * std::sqrt(*cfg.power.static_share * Pt / d.state.static_power()));
        }
        d.transmit_power = resolve_transmit_power(cfg, d.state.static_power());
        d.state.xi = resolve_xi(cfg, d.state, d.transmit_power);
        return d;
    }

    ExperimentResult run_experiment(const ExperimentConfig &cfg)
    {
        ExperimentResult res;
        switch (cfg.kind)
        {
        case ExperimentKind::Beampattern:
            res.artifacts.push_back(beampattern(cfg));
            res.artifacts.push_back(beampattern_points(cfg));
            break;
        case ExperimentKind::Constellation:
            res.artifacts.push_back(constellation(cfg));
            break;
        case ExperimentKind::BerGrid:
            res.artifacts.push_back(ber_grid(cfg));
            break;
        case ExperimentKind::BerSweep:
            res.artifacts.push_back(ber_sweep(cfg));
            break;
        case ExperimentKind::SameDirection:
            res.artifacts.push_back(same_direction(cfg));
            break;
        case ExperimentKind::SumrateMultipath:
            res.artifacts.push_back(sumrate_multipath(cfg));
            break;
        case ExperimentKind::SecrecyRateSweep:
            res.artifacts.push_back(cfg.sweep.variable == "delta_m" ? secrecy_rate_delta(cfg) : secrecy_rate_pt(cfg));
            break;
        case ExperimentKind::OutageCurve:
            res.artifacts.push_back(outage_curve(cfg));
            break;
        case ExperimentKind::SecrecyMap:
            res.artifacts.push_back(secrecy_map_artifact(cfg));
            break;
        case ExperimentKind::Validate:
            return validate_suite(cfg);
        }
        return res;
    }

    std::vector<std::filesystem::path> write_artifacts(const ExperimentResult &res, const ExperimentConfig &cfg,
                                                       const std::filesystem::path &dir)
    {
        std::vector<std::filesystem::path> written;
        try
        {
            std::filesystem::create_directories(dir);
            const ArtifactMeta meta{fnv1a_hex(cfg.canonical), cfg.seed, to_string(cfg.kind)};
            for (const CsvArtifact &a : res.artifacts)
            {
                const auto csv = dir / (a.name + ".csv");
                const auto side = dir / (a.name + ".meta.json");
                written.push_back(csv);
                write_csv(a, csv);
                written.push_back(side);
                write_meta(a, meta, side);
            }
        }
        catch (...)
        {
            for (const auto &p : written)
            {
                std::error_code ec;
                std::filesystem::remove(p, ec);
            }
            try
            {
                throw;
            }
            catch (const std::filesystem::filesystem_error &e)
            {
                throw IoError(e.what());
            }
        }
        return written;
    }
}
