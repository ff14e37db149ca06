// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nfsec
{
    namespace
    {
        void check_stream(const State &state, Eigen::Index m)
        {
            if (m < 0 || m >= state.user_count())
                throw DomainError("stream index " + std::to_string(m) + " out of range");
        }

        void check_noise(double noise_power)
        {
            if (!(noise_power > 0.0))
                throw DomainError("noise power must be positive");
        }
    }

    CMatrix avg_outer_product(const State &state, Eigen::Index m)
    {
        check_stream(state, m);
        const CVector s = state.W_static.col(m);
        CMatrix out = s * s.adjoint();
        out += (state.xi * state.xi) * state.P_null;
        return out;
    }

    PowerTerms avg_power_los(const CVector &h, const State &state, Eigen::Index m)
    {
        check_stream(state, m);
        const CVector g = state.F.adjoint() * h;
        const double an = (g.adjoint() * state.P_null * g).value().real();
        const CVector v = state.W_static.adjoint() * g;
        const double xi2 = state.xi * state.xi;
        PowerTerms t;
        t.desired = xi2 * an + std::norm(v(m));
        t.interference = double(state.user_count() - 1) * xi2 * an + (v.squaredNorm() - std::norm(v(m)));
        return t;
    }

    PowerTerms avg_power_multipath(const CMatrix &R, const CVector &h_bar, const State &state, Eigen::Index m)
    {
        check_stream(state, m);
        if (R.rows() != state.n_antennas() || R.cols() != state.n_antennas() || h_bar.size() != state.n_antennas())
            throw DomainError("covariance and mean channel must match the array size");
        const CVector g = state.F.adjoint() * h_bar;
        CMatrix Q = state.F.adjoint() * R * state.F;
        Q.noalias() += g * g.adjoint();
        const double an = (Q * state.P_null).trace().real();
        const double xi2 = state.xi * state.xi;
        PowerTerms t;
        for (Eigen::Index p = 0; p < state.user_count(); ++p)
        {
            const CVector s = state.W_static.col(p);
            const double power = xi2 * an + (s.adjoint() * Q * s).value().real();
            (p == m ? t.desired : t.interference) += power;
        }
        return t;
    }

    double avg_sinr_los(const CVector &h, const State &state, Eigen::Index m, double noise_power)
    {
        check_noise(noise_power);
        const PowerTerms t = avg_power_los(h, state, m);
        return t.desired / (t.interference + noise_power);
    }

    double avg_sinr_multipath(const CMatrix &R, const CVector &h_bar, const State &state, Eigen::Index m,
                              double noise_power)
    {
        check_noise(noise_power);
        const PowerTerms t = avg_power_multipath(R, h_bar, state, m);
        return t.desired / (t.interference + noise_power);
    }

    double rate_upper(double sinr)
    {
        if (!(sinr >= 0.0))
            throw DomainError("SINR must be non-negative");
        return std::log2(1.0 + sinr);
    }

    double secrecy_capacity_approx(double user_sinr, double eve_sinr)
    {
        return std::max(rate_upper(user_sinr) - rate_upper(eve_sinr), 0.0);
    }

    SinrReport sinr_report(const ArrayGeometry &geom, const State &state, std::span<const Position3> positions,
                           double noise_power)
    {
        const auto P = Eigen::Index(positions.size());
        const Eigen::Index M = state.user_count();
        SinrReport rep{Eigen::MatrixXd(P, M), Eigen::MatrixXd(P, M), Eigen::MatrixXd(P, M)};
        for (Eigen::Index i = 0; i < P; ++i)
        {
            const CVector h = los_channel(geom, positions[std::size_t(i)]);
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double s = avg_sinr_los(h, state, m, noise_power);
                rep.sinr(i, m) = s;
                rep.rate(i, m) = rate_upper(s);
                rep.secrecy(i, m) = secrecy_capacity_approx(state.beta(m) * state.beta(m) / noise_power, s);
            }
        }
        return rep;
    }

    double xi_for_target_secrecy(double delta, const CVector &h_eve, const State &state, Eigen::Index m,
                                 double noise_power)
    {
        check_stream(state, m);
        check_noise(noise_power);
        if (!(delta >= 0.0))
            throw DomainError("target secrecy capacity must be non-negative");
        const CVector g = state.F.adjoint() * h_eve;
        const double an = (g.adjoint() * state.P_null * g).value().real();
        const CVector v = state.W_static.adjoint() * g;
        const double desired = std::norm(v(m));
        const double interference = v.squaredNorm() - desired;
        const double M1 = double(state.user_count() - 1);

        if (!(M1 * desired > interference + noise_power))
            throw ConditionViolated("eavesdropper secrecy capacity is not increasing in xi at this position");

        const double beta = state.beta(m);
        const double target = std::exp2(-delta) * (1.0 + beta * beta / noise_power) - 1.0;
        const double num = desired - target * (interference + noise_power);
        const double den = an * (M1 * target - 1.0);
        if (num <= 0.0)
            return 0.0;
        if (!(den > 0.0))
            throw Infeasible("target secrecy capacity is unreachable for any xi");
        return std::sqrt(num / den);
    }

    EveSinrParams eve_sinr_params(const CVector &h_eve, const State &state, Eigen::Index m)
    {
        check_stream(state, m);
        if (!(state.xi > 0.0))
            throw DomainError("eavesdropper SINR distribution requires xi > 0");
        EveSinrParams p;
        p.m = m;
        const CVector g = state.F.adjoint() * h_eve;
        p.u = state.P_null * g;
        p.v = (g.adjoint() * state.W_static).transpose();
        const double un = p.u.norm();
        if (!(un > 1e-12 * h_eve.norm() * state.F.norm()))
            throw DegenerateNullSpace("eavesdropper channel lies in the span of the user channels");
        const double scale = 2.0 / (state.xi * state.xi * un * un);
        const double desired = std::norm(p.v(m));
        p.lambda1 = scale * desired;
        p.lambda2 = scale * std::max(p.v.squaredNorm() - desired, 0.0);
        return p;
    }

    double user_sinr_pdf(double y, double beta, double noise_power)
    {
        if (!(y > 0.0) || !(beta > 0.0) || !(noise_power > 0.0))
            throw DomainError("user_sinr_pdf requires positive arguments");
        const double c = beta * beta / noise_power;
        return c / (y * y) * std::exp(-c / y);
    }

    double secrecy_outage(double rate_target, double beta, double noise_power, const EveSinrParams &params,
                          Eigen::Index M, const QuadratureOptions &quad, const SeriesControl &series)
    {
        if (!(rate_target >= 0.0))
            throw DomainError("target secrecy rate must be non-negative");
        if (!(beta > 0.0))
            throw DomainError("symbol gain must be positive");
        check_noise(noise_power);
        if (M < 2)
            throw DomainError("secrecy outage needs at least two streams");
        const double snr = beta * beta / noise_power;
        const double growth = std::exp2(rate_target);
        const double M1 = double(M - 1);
        auto integrand = [&](double s)
        {
            const double threshold = growth * (s / M1 + 1.0) - 1.0;
            if (!(threshold > 0.0))
                return 0.0;
            const double miss = std::exp(-snr / threshold);
            if (miss == 0.0)
                return 0.0;
            return miss * dncf_scaled_pdf(s, params.lambda1, params.lambda2, int(M), series);
        };
        QuadratureOptions opt = quad;
        if (opt.breakpoints.empty())
            opt.breakpoints = dncf_breakpoints(params.lambda1, params.lambda2, int(M));
        const double p = integrate_semi_infinite(integrand, opt);
        return std::clamp(p, 0.0, 1.0);
    }

    std::string to_string(CellStatus s)
    {
        switch (s)
        {
        case CellStatus::Ok:
            return "ok";
        case CellStatus::DegenerateNullSpace:
            return "degenerate_null_space";
        case CellStatus::Coincident:
            return "coincident";
        case CellStatus::SeriesNotConverged:
            return "series_not_converged";
        case CellStatus::QuadratureFailure:
            return "quadrature_failure";
        case CellStatus::Invalid:
            return "invalid";
        }
        return "unknown";
    }

    SecrecyMap secrecy_map(const Scenario &scenario, const State &state, Eigen::Index m,
                           std::span<const Position3> grid, double rate_target, double epsilon,
                           const SeriesControl &series)
    {
        check_stream(state, m);
        if (!(state.xi > 0.0))
            throw DomainError("secrecy map requires xi > 0");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        SecrecyMap out;
        out.outage.reserve(grid.size());
        out.secure.reserve(grid.size());
        out.status.reserve(grid.size());
        for (const Position3 &r : grid)
        {
            double p = nan;
            CellStatus st = CellStatus::Ok;
            try
            {
                const CVector h = los_channel(scenario.geometry, r);
                const EveSinrParams prm = eve_sinr_params(h, state, m);
                p = secrecy_outage(rate_target, state.beta(m), scenario.noise_power, prm, state.user_count(), {},
                                   series);
            }
            catch (const CoincidentPosition &)
            {
                st = CellStatus::Coincident;
                p = 1.0;
            }
            catch (const DegenerateNullSpace &)
            {
                st = CellStatus::DegenerateNullSpace;
                p = 1.0;
            }
            catch (const SeriesNotConverged &)
            {
                st = CellStatus::SeriesNotConverged;
            }
            catch (const QuadratureFailure &)
            {
                st = CellStatus::QuadratureFailure;
            }
            catch (const DomainError &)
            {
                st = CellStatus::Invalid;
            }
            out.outage.push_back(p);
            out.secure.push_back(p <= epsilon);
            out.status.push_back(st);
        }
        return out;
    }
}
