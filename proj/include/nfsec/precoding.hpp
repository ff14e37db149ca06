// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_PRECODING_HPP
#define NFSEC_PRECODING_HPP

#include "nfsec/errors.hpp"
#include "nfsec/linalg.hpp"
#include "nfsec/rng.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace nfsec
{
    // Unit-modulus analog precoder F (N x N_RF). A fully-digital transmitter is
    // represented by F = I and is the only exception to the unit-modulus rule.
    template <typename Real>
    struct AnalogPrecoder
    {
        CMat<Real> F;
        bool fully_digital = false;
        bool near_degenerate = false; // singular-value gap below 1e-10 relative
    };

    // Per-slot digital precoder W(k) (N_RF x M).
    template <typename Real>
    struct SlotPrecoder
    {
        CMat<Real> W;
        std::size_t slot = 0;
        Real xi = 0;
    };

    enum class XiRule
    {
        Bound, // time-agnostic closed form, hoisted out of the slot loop
        Exact, // per-slot root of the power quadratic
        Mean   // fixed xi meeting P_t on average over AN draws
    };

    // SVD-based analog design. Takes the right singular vectors of H_U^H ordered by
    // descending singular value; for n_rf beyond rank M the columns are completed
    // with an orthonormal null-space basis in Householder column order.
    template <typename Derived>
    AnalogPrecoder<typename Derived::RealScalar> design_analog(const Eigen::MatrixBase<Derived> &H_U, Eigen::Index n_rf)
    {
        using Real = typename Derived::RealScalar;
        using C = std::complex<Real>;
        const Eigen::Index n = H_U.rows();
        const Eigen::Index m = H_U.cols();
        if (n_rf < 1 || n_rf > n)
            throw DomainError("n_rf must lie in [1, N]");
        for (Eigen::Index c = 0; c < m; ++c)
            if (H_U.col(c).squaredNorm() == Real(0))
                throw RankDeficient("channel matrix has a zero column");

        const CMat<Real> A = H_U.adjoint();
        Eigen::JacobiSVD<CMat<Real>> svd(A, Eigen::ComputeThinV);
        const auto &sv = svd.singularValues();

        std::vector<Eigen::Index> order(std::size_t(sv.size()));
        std::iota(order.begin(), order.end(), Eigen::Index(0));
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b)
                         { return sv(a) > sv(b); });

        AnalogPrecoder<Real> out;
        for (Eigen::Index i = 1; i < sv.size(); ++i)
            if (sv(order[i - 1]) - sv(order[i]) < Real(1e-10) * sv(order[0]))
                out.near_degenerate = true;

        const Eigen::Index r = std::min<Eigen::Index>(sv.size(), m);
        CMat<Real> D(n, n_rf);
        for (Eigen::Index c = 0; c < std::min(n_rf, r); ++c)
            D.col(c) = svd.matrixV().col(order[std::size_t(c)]);
        if (n_rf > r)
        {
            CMat<Real> V(n, r);
            for (Eigen::Index c = 0; c < r; ++c)
                V.col(c) = svd.matrixV().col(order[std::size_t(c)]);
            Eigen::HouseholderQR<CMat<Real>> qr(V);
            const CMat<Real> Q = qr.householderQ() * CMat<Real>::Identity(n, n_rf);
            D.rightCols(n_rf - r) = Q.rightCols(n_rf - r);
        }

        out.F = D.unaryExpr([](const C &z)
                            { return z == C(0) ? C(1) : z / std::abs(z); });
        return out;
    }

    template <typename Real = double>
    AnalogPrecoder<Real> fully_digital(Eigen::Index n)
    {
        return {CMat<Real>::Identity(n, n), true, false};
    }

    // H_M = F^H H_U
    template <typename DF, typename DH>
    auto effective_channel(const Eigen::MatrixBase<DF> &F, const Eigen::MatrixBase<DH> &H_U)
    {
        return CMat<typename DF::RealScalar>(F.adjoint() * H_U);
    }

    // (H^H H)^{-1} H^H for a full-column-rank H.
    template <typename Derived>
    CMat<typename Derived::RealScalar> pseudo_inverse(const Eigen::MatrixBase<Derived> &H)
    {
        using Real = typename Derived::RealScalar;
        const CMat<Real> G = H.adjoint() * H;
        Eigen::SelfAdjointEigenSolver<CMat<Real>> eig(G, Eigen::EigenvaluesOnly);
        const Real lo = eig.eigenvalues().minCoeff();
        const Real hi = eig.eigenvalues().maxCoeff();
        if (!(hi > Real(0)) || !(lo > hi * Real(1e-12)))
            throw IllConditioned("H^H H condition number exceeds 1e12");
        return G.llt().solve(CMat<Real>(H.adjoint()));
    }

    // I - H H^+
    template <typename Derived>
    CMat<typename Derived::RealScalar> null_projector(const Eigen::MatrixBase<Derived> &H)
    {
        using Real = typename Derived::RealScalar;
        // a square H has no null space; round-off would otherwise leave a ~1e-16 residue
        if (H.rows() == H.cols())
            return CMat<Real>::Zero(H.rows(), H.rows());
        const CMat<Real> P = CMat<Real>::Identity(H.rows(), H.rows()) - H * pseudo_inverse(H);
        // symmetrize away round-off so that P^H = P holds to machine precision
        return (P + P.adjoint()) / Real(2);
    }

    // (H^+)^H B
    template <typename Derived, typename DB>
    CMat<typename Derived::RealScalar> static_zf(const Eigen::MatrixBase<Derived> &H, const Eigen::MatrixBase<DB> &beta)
    {
        using Real = typename Derived::RealScalar;
        for (Eigen::Index m = 0; m < beta.size(); ++m)
            if (!(beta(m) > Real(0)))
                throw DomainError("symbol gains must be positive");
        return pseudo_inverse(H).adjoint() * beta.template cast<std::complex<Real>>().asDiagonal();
    }

    // Unit-modulus AN matrix with i.i.d. U(0, 2pi) phases.
    template <typename Real = double>
    CMat<Real> draw_an(Eigen::Index n_rf, Eigen::Index m, Rng &rng)
    {
        std::uniform_real_distribution<Real> phase(Real(0), Real(2 * std::numbers::pi));
        CMat<Real> W(n_rf, m);
        for (Eigen::Index c = 0; c < m; ++c)
            for (Eigen::Index r = 0; r < n_rf; ++r)
                W(r, c) = std::polar(Real(1), phase(rng));
        return W;
    }

    // Everything about the design that does not change from slot to slot.
    template <typename Real>
    struct PrecoderState
    {
        CMat<Real> F;        // N x N_RF
        CMat<Real> H_M;      // N_RF x M
        CMat<Real> H_pinv;   // M x N_RF
        CMat<Real> W_static; // N_RF x M
        CMat<Real> P_null;   // N_RF x N_RF
        RVec<Real> beta;
        Real xi = 0;
        bool fully_digital = false;

        Eigen::Index n_rf() const { return F.cols(); }
        Eigen::Index n_antennas() const { return F.rows(); }
        Eigen::Index user_count() const { return H_M.cols(); }

        // ||F W_static||_F^2
        Real static_power() const { return (F * W_static).squaredNorm(); }

        PrecoderState with_xi(Real x) const
        {
            PrecoderState s = *this;
            s.xi = x;
            return s;
        }

        // Replace the symbol gains; ZF columns scale linearly.
        PrecoderState with_beta(const RVec<Real> &b) const
        {
            PrecoderState s = *this;
            s.W_static = H_pinv.adjoint() * b.template cast<std::complex<Real>>().asDiagonal();
            s.beta = b;
            return s;
        }
    };

    template <typename DF, typename DH, typename DB>
    PrecoderState<typename DF::RealScalar> make_state(const Eigen::MatrixBase<DF> &F, const Eigen::MatrixBase<DH> &H_U,
                                                      const Eigen::MatrixBase<DB> &beta, bool fully_digital = false)
    {
        using Real = typename DF::RealScalar;
        PrecoderState<Real> s;
        s.F = F;
        s.H_M = effective_channel(F, H_U);
        s.H_pinv = pseudo_inverse(s.H_M);
        s.W_static = static_zf(s.H_M, beta);
        s.P_null = null_projector(s.H_M);
        s.beta = beta;
        s.fully_digital = fully_digital;
        return s;
    }

    template <typename DH, typename DB>
    PrecoderState<typename DH::RealScalar> make_state(const AnalogPrecoder<typename DH::RealScalar> &analog,
                                                      const Eigen::MatrixBase<DH> &H_U, const Eigen::MatrixBase<DB> &beta)
    {
        return make_state(analog.F, H_U, beta, analog.fully_digital);
    }

    // Largest xi with ||F (W_static + xi P W_AN)||_F^2 <= P_t for this AN draw.
    template <typename Real>
    Real xi_exact(const CMat<Real> &F, const CMat<Real> &W_static, const CMat<Real> &P_null,
                  const CMat<Real> &W_AN, Real P_t)
    {
        const CMat<Real> S = F * W_static;
        const CMat<Real> T = F * (P_null * W_AN);
        const Real A = T.squaredNorm();
        const Real B = Real(2) * (S.adjoint() * T).trace().real();
        const Real C = S.squaredNorm() - P_t;
        if (!(C < Real(0)))
            throw Infeasible("transmit power does not exceed the static ZF power");
        if (!(A > Real(0)))
            return Real(0); // no null space to place AN in
        // (-B + sqrt(B^2 - 4AC)) / 2A, rewritten to avoid cancellation
        return Real(-2) * C / (B + std::sqrt(B * B - Real(4) * A * C));
    }

    template <typename Real>
    Real xi_exact(const PrecoderState<Real> &s, const CMat<Real> &W_AN, Real P_t)
    {
        return xi_exact(s.F, s.W_static, s.P_null, W_AN, P_t);
    }

    // Time-agnostic xi guaranteeing the power constraint for every AN draw.
    template <typename Real>
    Real xi_bound(const CMat<Real> &F, const CMat<Real> &W_static, Real P_t)
    {
        const Real s2 = (F * W_static).squaredNorm();
        if (!(P_t > s2))
            throw Infeasible("sqrt(P_t) must exceed ||F W_static||_F");
        const Real n = Real(F.rows());
        const Real n_rf = Real(F.cols());
        const Real m = Real(W_static.cols());
        return (std::sqrt(P_t) - std::sqrt(s2)) / ((Real(1) + std::sqrt(m)) * n_rf * std::sqrt(m * n));
    }

    template <typename Real>
    Real xi_bound(const PrecoderState<Real> &s, Real P_t)
    {
        return xi_bound(s.F, s.W_static, P_t);
    }

    // AN draw of slot k under root seed; shared by every consumer that needs to
    // reproduce the precoder sequence.
    template <typename Real = double>
    CMat<Real> slot_an(std::uint64_t seed, std::size_t slot, Eigen::Index n_rf, Eigen::Index m)
    {
        Rng rng = make_rng(seed, Stream::ArtificialNoise, slot);
        return draw_an<Real>(n_rf, m, rng);
    }

    // E||F (W_static + xi P W_AN)||_F^2 = P_t, using E[W_AN W_AN^H] = M I.
    template <typename Real>
    Real xi_mean(const PrecoderState<Real> &s, Real P_t)
    {
        const Real s2 = s.static_power();
        if (!(P_t > s2))
            throw Infeasible("transmit power does not exceed the static ZF power");
        const Real an = Real(s.user_count()) * (s.P_null * (s.F.adjoint() * s.F)).trace().real();
        if (!(an > Real(0)))
            return Real(0);
        return std::sqrt((P_t - s2) / an);
    }

    template <typename Real>
    Real resolve_xi(const PrecoderState<Real> &s, Real P_t, XiRule rule, std::uint64_t seed)
    {
        switch (rule)
        {
        case XiRule::Bound:
            return xi_bound(s, P_t);
        case XiRule::Mean:
            return xi_mean(s, P_t);
        case XiRule::Exact:
            break;
        }
        return xi_exact(s, slot_an<Real>(seed, 0, s.n_rf(), s.user_count()), P_t);
    }

    // W(k) = W_static + xi P_null W_AN
    template <typename Real>
    SlotPrecoder<Real> slot_precoder(const PrecoderState<Real> &s, const CMat<Real> &W_AN, std::size_t slot = 0)
    {
        SlotPrecoder<Real> out;
        out.W = s.W_static;
        if (s.xi != Real(0))
            out.W.noalias() += std::complex<Real>(s.xi) * (s.P_null * W_AN);
        out.slot = slot;
        out.xi = s.xi;
        return out;
    }

    template <typename Real>
    struct PrecoderRun
    {
        PrecoderState<Real> state; // xi holds the hoisted bound (or 0 for K = 0 under Exact)
        std::vector<SlotPrecoder<Real>> slots;
    };

    // Dynamic precoder design: analog stage once, xi once (Bound) or per slot
    // (Exact) or once on average (Mean), fresh AN every slot from the (seed, slot) stream.
    template <typename Real>
    PrecoderRun<Real> run_algorithm1(const PrecoderState<Real> &base, Real P_t, std::size_t K,
                                     std::uint64_t seed, XiRule rule = XiRule::Bound)
    {
        PrecoderRun<Real> run;
        run.state = base;
        if (rule != XiRule::Exact)
            run.state.xi = resolve_xi(base, P_t, rule, seed);
        run.slots.reserve(K);
        for (std::size_t k = 0; k < K; ++k)
        {
            const CMat<Real> W_AN = slot_an<Real>(seed, k, base.n_rf(), base.user_count());
            if (rule == XiRule::Exact)
            {
                const Real x = xi_exact(base, W_AN, P_t);
                run.slots.push_back(slot_precoder(base.with_xi(x), W_AN, k));
                if (k == 0)
                    run.state.xi = x;
            }
            else
            {
                run.slots.push_back(slot_precoder(run.state, W_AN, k));
            }
        }
        return run;
    }
}

#endif
