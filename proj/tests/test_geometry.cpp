// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include "nfsec/geometry.hpp"
#include "nfsec/montecarlo.hpp"

#include <cmath>
#include <numbers>

using namespace nfsec;

namespace
{
    constexpr double c0 = 299792458.0;

    // element (i, l) computed by hand
    Position3 element(int i, int l, int rows, int cols, double d)
    {
        return {(l - 0.5 * (cols - 1)) * d, (i - 0.5 * (rows - 1)) * d, 0.0};
    }
}

TEST_CASE("fraunhofer distance of the 40x40 half-wavelength array")
{
    const auto g = ArrayGeometry::half_wavelength(40, 40, 28e9);
    const double lambda = c0 / 28e9;
    const double D = std::sqrt(2.0) * 39.0 * lambda / 2.0;
    CHECK(fraunhofer_distance(g) == doctest::Approx(2.0 * D * D / lambda).epsilon(1e-12));
    CHECK(std::abs(fraunhofer_distance(g) - 16.3) <= 0.1);
}

TEST_CASE("fraunhofer distance of the 16x16 desk array")
{
    const auto g = ArrayGeometry::half_wavelength(16, 16, 28e9);
    CHECK(fraunhofer_distance(g) == doctest::Approx(2.409).epsilon(1e-3));
}

TEST_CASE("elements are centred and row-major")
{
    const auto g = ArrayGeometry::half_wavelength(3, 5, 28e9);
    const Eigen::Matrix3Xd s = element_position_matrix(g);
    REQUIRE(s.cols() == 15);
    CHECK(s.rowwise().mean().norm() < 1e-15);
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 5; ++l)
            CHECK((s.col(i * 5 + l) - element(i, l, 3, 5, g.spacing)).norm() < 1e-15);
}

TEST_CASE("spherical-wave channel matches per-element path loss and phase")
{
    const auto g = ArrayGeometry::half_wavelength(4, 6, 28e9);
    const Position3 r(0.3, -0.2, 1.1);
    const CVector h = los_channel(g, r);
    const double lambda = c0 / 28e9;
    const double k = 2.0 * std::numbers::pi / lambda;
    for (int i = 0; i < 4; ++i)
        for (int l = 0; l < 6; ++l)
        {
            const double dist = (r - element(i, l, 4, 6, g.spacing)).norm();
            const cplx expect = lambda / (4.0 * std::numbers::pi * dist) * std::exp(cplx(0.0, k * dist));
            CHECK(std::abs(h(i * 6 + l) - expect) < 1e-12 * std::abs(expect));
        }
}

TEST_CASE("channel at an element position is rejected")
{
    const auto g = ArrayGeometry::half_wavelength(2, 2, 28e9);
    CHECK_THROWS_AS(los_channel(g, element(1, 0, 2, 2, g.spacing)), CoincidentPosition);
}

TEST_CASE("invalid geometry is rejected")
{
    ArrayGeometry g;
    g.n_rows = 0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("plane-wave variant: equal magnitudes, direction-only phase")
{
    const auto g = ArrayGeometry::half_wavelength(8, 8, 28e9);
    const Position3 r(0.2, 0.3, 0.9);
    const CVector h1 = far_field_channel_variant(g, r);
    const CVector h2 = far_field_channel_variant(g, 2.5 * r);
    const double a = g.wavelength() / (4.0 * std::numbers::pi * r.norm());
    CHECK((h1.cwiseAbs().array() - a).abs().maxCoeff() < 1e-15);
    const CVector ratio = h1.cwiseProduct(h2.conjugate());
    const cplx ref = ratio(0) / std::abs(ratio(0));
    for (Eigen::Index n = 0; n < ratio.size(); ++n)
        CHECK(std::abs(ratio(n) / std::abs(ratio(n)) - ref) < 1e-9);
    CHECK_THROWS_AS(far_field_channel_variant(g, Position3::Zero()), CoincidentPosition);
}

TEST_CASE("spherical and plane-wave channels agree far beyond the Fraunhofer distance")
{
    const auto g = ArrayGeometry::half_wavelength(4, 4, 28e9);
    const Position3 dir = Position3(0.1, 0.2, 1.0).normalized();
    const Position3 r = 1e4 * fraunhofer_distance(g) * dir;
    const CVector hn = los_channel(g, r);
    const CVector hf = far_field_channel_variant(g, r);
    const double corr = std::abs(hn.dot(hf)) / (hn.norm() * hf.norm());
    CHECK(corr > 1.0 - 1e-6);
}

TEST_CASE("multipath covariance matches the sample covariance of channel draws")
{
    const auto g = ArrayGeometry::half_wavelength(3, 3, 28e9);
    const Position3 user(0.1, 0.1, 0.4);
    const std::vector<Scatterer> sc = {{Position3(-0.2, 0.1, 0.3), 2e6}, {Position3(0.3, -0.1, 0.2), 5e5}};
    const CMatrix R = multipath_covariance(g, user, std::span<const Scatterer>(sc));
    const CVector hbar = los_channel(g, user);
    Rng rng(42);
    CMatrix acc = CMatrix::Zero(9, 9);
    const int draws = 40000;
    for (int t = 0; t < draws; ++t)
    {
        const CVector d = sample_multipath_channel(g, user, std::span<const Scatterer>(sc), rng) - hbar;
        acc.noalias() += d * d.adjoint();
    }
    acc /= double(draws);
    CHECK(rel_frobenius(acc, R) < 0.03);
}
