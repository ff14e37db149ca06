// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <doctest.h>

#include "nfsec/errors.hpp"
#include "nfsec/modulation.hpp"

#include <bit>

using namespace nfsec;

namespace
{
    const ModulationScheme schemes[] = {ModulationScheme::qpsk(), ModulationScheme::psk(2), ModulationScheme::psk(8),
                                        ModulationScheme::qam(16), ModulationScheme::qam(64)};
}

TEST_CASE("constellations have unit average energy")
{
    for (const auto &mod : schemes)
    {
        const auto &pts = mod.points();
        REQUIRE(int(pts.size()) == mod.order);
        double e = 0;
        for (const cplx &p : pts)
            e += std::norm(p);
        CHECK(e / double(pts.size()) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("nearest neighbours differ in exactly one bit")
{
    for (const auto &mod : schemes)
    {
        const auto &pts = mod.points();
        double dmin = INFINITY;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                dmin = std::min(dmin, std::abs(pts[a] - pts[b]));
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                if (std::abs(pts[a] - pts[b]) < dmin * (1 + 1e-9))
                    CHECK(std::popcount(unsigned(a ^ b)) == 1);
    }
}

TEST_CASE("noiseless detection recovers every label under any gain")
{
    Rng rng(3);
    for (const auto &mod : schemes)
    {
        const auto block = gen_symbols(mod, 2000, rng);
        const cplx gain = std::polar(3e-5, 1.1);
        const CVector y = gain * block.symbols;
        CHECK(detect(y, mod, gain) == block.labels);
        CHECK(demodulate(y, mod, gain) == labels_to_bits(block.labels, mod));
    }
}

TEST_CASE("labels unpack to bits least significant first")
{
    const auto mod = ModulationScheme::qam(16);
    const auto bits = labels_to_bits({0b1011}, mod);
    CHECK(bits == std::vector<std::uint8_t>{1, 1, 0, 1});
}

TEST_CASE("symbol draws are uniform over the alphabet")
{
    Rng rng(4);
    const auto mod = ModulationScheme::psk(8);
    const auto block = gen_symbols(mod, 80000, rng);
    std::vector<int> count(8, 0);
    for (int l : block.labels)
        ++count[std::size_t(l)];
    for (int c : count)
        CHECK(std::abs(c - 10000) < 450);
}

TEST_CASE("scheme names parse and print")
{
    CHECK(ModulationScheme::parse("qpsk") == ModulationScheme::qpsk());
    CHECK(ModulationScheme::parse("16-QAM") == ModulationScheme::qam(16));
    CHECK(ModulationScheme::parse("8psk").name() == "8PSK");
    CHECK(ModulationScheme::parse(ModulationScheme::qam(64).name()) == ModulationScheme::qam(64));
    CHECK_THROWS(ModulationScheme::parse("12QAM"));
    CHECK_THROWS(ModulationScheme::parse("banana"));
}
