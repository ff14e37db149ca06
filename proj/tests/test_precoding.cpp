// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include "fixtures.hpp"

#include <Eigen/SVD>

using namespace nfsec;
using nfsec::testing::random_instance;

namespace
{
    // H^+ from the thin SVD, V S^-1 U^H
    CMatrix svd_pinv(const CMatrix &H)
    {
        Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector inv = svd.singularValues().cwiseInverse();
        return svd.matrixV() * inv.cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
    }

    double slot_power(const State &s, const CMatrix &W_AN, double xi)
    {
        return (s.F * (s.W_static + xi * (s.P_null * W_AN))).squaredNorm();
    }
}

TEST_CASE("analog precoder entries are unit modulus")
{
    Rng rng(1);
    for (int n_rf : {2, 5, 16})
    {
        const auto in = random_instance(4, 4, n_rf, 2, rng);
        CHECK(in.state.F.cols() == n_rf);
        CHECK((in.state.F.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("analog design rejects bad inputs")
{
    Rng rng(2);
    const auto in = random_instance(4, 4, 4, 2, rng);
    CHECK_THROWS_AS(design_analog(in.H, 0), DomainError);
    CHECK_THROWS_AS(design_analog(in.H, 17), DomainError);
    CMatrix H = in.H;
    H.col(1).setZero();
    CHECK_THROWS_AS(design_analog(H, 4), RankDeficient);
}

TEST_CASE("pseudo-inverse agrees with the SVD construction")
{
    Rng rng(3);
    for (int t = 0; t < 10; ++t)
    {
        const auto in = random_instance(4, 4, 6, 3, rng);
        CHECK(rel_frobenius(pseudo_inverse(in.state.H_M), svd_pinv(in.state.H_M)) < 1e-9);
    }
}

TEST_CASE("coincident users make the effective channel ill-conditioned")
{
    const auto g = ArrayGeometry::half_wavelength(4, 4, 28e9);
    const std::vector<Position3> users(2, Position3(0.1, 0.1, 0.5));
    const CMatrix H = channel_matrix(g, std::span<const Position3>(users));
    CHECK_THROWS_AS(pseudo_inverse(H), IllConditioned);
}

TEST_CASE("state invariants: ZF diagonal, projector idempotent and Hermitian")
{
    Rng rng(4);
    for (int t = 0; t < 20; ++t)
    {
        const auto in = random_instance(4, 4, 4 + t % 8, 2 + t % 3, rng);
        const State &s = in.state;
        const CMatrix B = s.beta.cast<cplx>().asDiagonal();
        CHECK(rel_frobenius(CMatrix(s.H_M.adjoint() * s.W_static), B) < 1e-9);
        CHECK((s.P_null * s.P_null - s.P_null).norm() < 1e-9);
        CHECK((s.P_null - s.P_null.adjoint()).norm() < 1e-12);
        CHECK((s.H_M.adjoint() * s.P_null).norm() < 1e-9 * s.H_M.norm());
    }
}

TEST_CASE("every slot precoder zero-forces the users")
{
    Rng rng(5);
    const auto in = random_instance(6, 6, 8, 3, rng);
    const double Pt = 2.0 * in.state.static_power();
    const auto run = run_algorithm1(in.state, Pt, 200, 99, XiRule::Mean);
    const CMatrix B = in.state.beta.cast<cplx>().asDiagonal();
    for (const auto &slot : run.slots)
        CHECK(rel_frobenius(CMatrix(in.state.H_M.adjoint() * slot.W), B) < 1e-9);
}

TEST_CASE("exact xi meets the power budget with equality")
{
    Rng rng(6);
    const auto in = random_instance(4, 4, 4, 2, rng);
    const double Pt = 3.0 * in.state.static_power();
    for (std::size_t k = 0; k < 50; ++k)
    {
        const CMatrix W = slot_an(7, k, in.state.n_rf(), in.state.user_count());
        const double x = xi_exact(in.state, W, Pt);
        CHECK(std::abs(slot_power(in.state, W, x) / Pt - 1.0) < 1e-10);
    }
}

TEST_CASE("exact xi is the largest feasible scale on a refined grid")
{
    Rng rng(8);
    for (int t = 0; t < 20; ++t)
    {
        const auto in = random_instance(4, 4, 4, 2, rng);
        const double Pt = 1.5 * in.state.static_power();
        const CMatrix W = slot_an(11, std::size_t(t), 4, 2);
        // coarse-to-fine scan for the last feasible grid point
        double lo = 0.0, hi = 1.0;
        while (slot_power(in.state, W, hi) <= Pt)
            hi *= 2.0;
        for (int level = 0; level < 6; ++level)
        {
            const int n = 100;
            double last = lo;
            for (int i = 0; i <= n; ++i)
            {
                const double x = lo + (hi - lo) * i / n;
                if (slot_power(in.state, W, x) <= Pt)
                    last = x;
            }
            const double step = (hi - lo) / n;
            lo = last;
            hi = last + step;
        }
        CHECK(xi_exact(in.state, W, Pt) == doctest::Approx(lo).epsilon(1e-6));
    }
}

TEST_CASE("bound xi never exceeds the budget")
{
    Rng rng(9);
    const auto in = random_instance(6, 6, 6, 2, rng);
    const double Pt = 1.2 * in.state.static_power();
    const State s = in.state.with_xi(xi_bound(in.state, Pt));
    for (std::size_t k = 0; k < 500; ++k)
        CHECK(slot_power(s, slot_an(3, k, s.n_rf(), 2), s.xi) <= Pt);
}

TEST_CASE("mean xi meets the budget on average")
{
    Rng rng(10);
    const auto in = random_instance(6, 6, 8, 2, rng);
    const double Pt = 2.0 * in.state.static_power();
    const double x = xi_mean(in.state, Pt);
    double acc = 0.0;
    const int K = 20000;
    for (int k = 0; k < K; ++k)
        acc += slot_power(in.state, slot_an(5, std::size_t(k), in.state.n_rf(), 2), x);
    CHECK(acc / K == doctest::Approx(Pt).epsilon(0.01));
}

TEST_CASE("every rule rejects a budget below the static power")
{
    Rng rng(12);
    const auto in = random_instance(4, 4, 4, 2, rng);
    const double Pt = 0.5 * in.state.static_power();
    const CMatrix W = slot_an(1, 0, 4, 2);
    CHECK_THROWS_AS(xi_exact(in.state, W, Pt), Infeasible);
    CHECK_THROWS_AS(xi_bound(in.state, Pt), Infeasible);
    CHECK_THROWS_AS(xi_mean(in.state, Pt), Infeasible);
}

TEST_CASE("without a null space no artificial noise is injected")
{
    Rng rng(13);
    const auto in = random_instance(4, 4, 2, 2, rng);
    CHECK(in.state.P_null.norm() == 0.0);
    const double Pt = 2.0 * in.state.static_power();
    CHECK(xi_exact(in.state, slot_an(1, 0, 2, 2), Pt) == 0.0);
    CHECK(xi_mean(in.state, Pt) == 0.0);
}

TEST_CASE("precoder sequence is reproducible from its seed")
{
    Rng rng(14);
    const auto in = random_instance(4, 4, 6, 2, rng);
    const double Pt = 2.0 * in.state.static_power();
    const auto a = run_algorithm1(in.state, Pt, 20, 77, XiRule::Exact);
    const auto b = run_algorithm1(in.state, Pt, 20, 77, XiRule::Exact);
    const auto c = run_algorithm1(in.state, Pt, 20, 78, XiRule::Exact);
    for (std::size_t k = 0; k < 20; ++k)
    {
        CHECK(a.slots[k].W == b.slots[k].W);
        CHECK(a.slots[k].W != c.slots[k].W);
    }
}

TEST_CASE("fully digital transmitter uses the identity")
{
    Rng rng(15);
    const auto in = random_instance(3, 3, 9, 2, rng, true);
    CHECK(in.state.F == CMatrix::Identity(9, 9));
    CHECK(in.state.fully_digital);
}

TEST_CASE("single precision instantiation keeps the ZF structure")
{
    Rng rng(16);
    const auto in = random_instance(4, 4, 4, 2, rng);
    const CMat<float> Hf = in.H.cast<std::complex<float>>();
    const auto Ff = design_analog(Hf, 4);
    const RVec<float> beta = RVec<float>::Constant(2, 1.0f);
    const auto s = make_state(Ff, Hf, beta);
    const CMat<float> B = beta.cast<std::complex<float>>().asDiagonal();
    CHECK(rel_frobenius(CMat<float>(s.H_M.adjoint() * s.W_static), B) < 1e-3f);
}
