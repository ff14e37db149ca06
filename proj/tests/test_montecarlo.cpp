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
#include "nfsec/montecarlo.hpp"

using namespace nfsec;

namespace
{
    struct Setup
    {
        Scenario sc;
        State state;
        CMatrix H;
    };

    Setup desk(double an_factor)
    {
        Setup s;
        s.sc.geometry = ArrayGeometry::half_wavelength(8, 8, 28e9);
        s.sc.users = {{-0.1, 0.05, 0.4}, {0.12, -0.04, 0.5}};
        s.sc.eavesdroppers = {{0.0, 0.2, 0.3}};
        s.sc.n_rf = 8;
        s.sc.noise_power = 1e-12;
        s.sc.symbol_gains = {1e-5, 1e-5};
        s.sc.modulations = {ModulationScheme::qpsk(), ModulationScheme::qam(16)};
        s.H = channel_matrix(s.sc.geometry, std::span<const Position3>(s.sc.users));
        s.state = make_state(design_analog(s.H, 8), s.H, s.sc.beta());
        s.state = s.state.with_xi(xi_mean(s.state, an_factor * s.state.static_power()));
        s.sc.transmit_power = an_factor * s.state.static_power();
        return s;
    }

    const Eigen::Index both[] = {0, 1};
}

TEST_CASE("unit ball samples are uniform")
{
    Rng rng(1);
    const int n = 100000;
    double r2 = 0, rmax = 0;
    Position3 mean = Position3::Zero();
    for (int i = 0; i < n; ++i)
    {
        const Position3 p = unit_ball_sample(rng);
        r2 += p.squaredNorm();
        rmax = std::max(rmax, p.norm());
        mean += p;
    }
    CHECK(rmax <= 1.0);
    CHECK(r2 / n == doctest::Approx(0.6).epsilon(0.01));
    CHECK((mean / n).norm() < 0.01);
}

TEST_CASE("position perturbations stay within the error radius")
{
    Rng rng(2);
    const std::vector<Position3> users{{0.1, 0.2, 1.0}, {-0.3, 0.0, 2.0}};
    const double delta = 0.05;
    double acc = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
    {
        const auto moved = perturb_positions(users, delta, rng);
        for (std::size_t m = 0; m < users.size(); ++m)
        {
            const double d = (moved[m] - users[m]).norm();
            CHECK(d <= delta);
            acc += d * d;
        }
    }
    CHECK(acc / (2 * n) == doctest::Approx(0.6 * delta * delta).epsilon(0.02));
    CHECK(perturb_positions(users, 0.0, rng) == users);
}

TEST_CASE("intended users decode without error at negligible noise")
{
    const Setup s = desk(4.0);
    BerOptions opt;
    opt.noise_power = 1e-30;
    const auto res = estimate_ber(s.sc, s.state, std::span<const Position3>(s.sc.users), both, 2000, 2, 5, opt);
    for (const auto &c : res.cells)
        if (c.position == c.stream)
        {
            CHECK(c.bit_errors == 0);
            CHECK(c.symbol_accuracy == 1.0);
        }
}

TEST_CASE("artificial noise scrambles an off-axis eavesdropper")
{
    const Setup s = desk(50.0);
    const auto res = estimate_ber(s.sc, s.state, std::span<const Position3>(s.sc.eavesdroppers), both, 4000, 1, 6);
    for (const auto &c : res.cells)
        CHECK(c.ber > 0.3);
}

TEST_CASE("received signal at the user is the scaled symbol plus noise")
{
    const Setup s = desk(3.0);
    Rng rng(7);
    const auto run = run_algorithm1(s.state, s.sc.transmit_power, 50, 8, XiRule::Mean);
    const auto block0 = gen_symbols(ModulationScheme::qpsk(), 50, rng);
    const auto block1 = gen_symbols(ModulationScheme::qpsk(), 50, rng);
    CMatrix X(2, 50);
    X.row(0) = block0.symbols.transpose();
    X.row(1) = block1.symbols.transpose();
    Rng noise(9);
    const CVector y = received_signal(s.H.col(0), s.state, X, std::span<const SlotPrecoder<double>>(run.slots), 1e-30, noise);
    CHECK(rel_frobenius(y, CVector(1e-5 * block0.symbols)) < 1e-8);
}

TEST_CASE("link simulation is reproducible from its seed")
{
    const Setup s = desk(4.0);
    const auto a = estimate_ber(s.sc, s.state, std::span<const Position3>(s.sc.eavesdroppers), both, 500, 2, 11);
    const auto b = estimate_ber(s.sc, s.state, std::span<const Position3>(s.sc.eavesdroppers), both, 500, 2, 11);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
    {
        CHECK(a.cells[i].bit_errors == b.cells[i].bit_errors);
        CHECK(a.cells[i].sinr == b.cells[i].sinr);
    }
}

TEST_CASE("an eavesdropper at the user position leaks the full rate")
{
    const Setup s = desk(4.0);
    const CVector h = s.H.col(0);
    CHECK(empirical_secrecy_rate(h, h, s.state, 0, s.sc.noise_power, 500, 3, s.sc.noise_power) == 0.0);
    const std::vector<CVector> none;
    CHECK_THROWS_AS(empirical_secrecy_rate(h, std::span<const CVector>(none), s.state, 0, 1e-12, 10, 3), DomainError);
}

TEST_CASE("worst-eve secrecy rate is below each single-eve rate")
{
    const Setup s = desk(6.0);
    const CVector h = s.H.col(0);
    const std::vector<CVector> eves{los_channel(s.sc.geometry, Position3(0.0, 0.2, 0.3)),
                                    los_channel(s.sc.geometry, Position3(-0.08, 0.04, 0.3))};
    const double joint = empirical_secrecy_rate(h, std::span<const CVector>(eves), s.state, 0, 1e-12, 2000, 4, 1e-12);
    for (const CVector &e : eves)
        CHECK(joint <= empirical_secrecy_rate(h, e, s.state, 0, 1e-12, 2000, 4, 1e-12) + 1e-12);
}

TEST_CASE("empirical outage is a non-decreasing function of the target rate")
{
    const Setup s = desk(6.0);
    const std::vector<CVector> eves{los_channel(s.sc.geometry, s.sc.eavesdroppers[0])};
    const std::vector<double> rates{0.0, 1.0, 2.0, 4.0, 8.0, 30.0};
    const Eigen::MatrixXd out = empirical_outage(s.H.col(0), std::span<const CVector>(eves), s.state, 0, 1e-12,
                                                 rates, 5000, 5);
    for (Eigen::Index j = 1; j < out.cols(); ++j)
        CHECK(out(0, j) >= out(0, j - 1));
    CHECK(out(0, out.cols() - 1) == 1.0);
}

TEST_CASE("plane-wave variant keeps the array-centre path loss")
{
    const auto g = ArrayGeometry::half_wavelength(6, 6, 28e9);
    const Position3 r(0.3, -0.2, 1.5);
    const CVector h = far_field_channel_variant(g, r);
    const double amp = g.wavelength() / (4 * std::numbers::pi * r.norm());
    CHECK((h.cwiseAbs().array() - amp).abs().maxCoeff() < 1e-12 * amp);
}
