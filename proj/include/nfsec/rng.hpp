// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_RNG_HPP
#define NFSEC_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace nfsec
{
    using Rng = std::mt19937_64;

    // Stream tags keep derived sub-streams of one root seed disjoint.
    enum class Stream : std::uint64_t
    {
        ArtificialNoise = 1,
        Symbols = 2,
        Noise = 3,
        Channel = 4,
        Perturbation = 5,
        Oracle = 6
    };

    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Seed of sub-stream (tag, index) under a root seed; independent of execution order.
    constexpr std::uint64_t derive_seed(std::uint64_t root, Stream tag, std::uint64_t index = 0)
    {
        return splitmix64(splitmix64(root ^ splitmix64(static_cast<std::uint64_t>(tag))) + index);
    }

    inline Rng make_rng(std::uint64_t root, Stream tag, std::uint64_t index = 0)
    {
        return Rng(derive_seed(root, tag, index));
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    template <typename Real = double>
    std::complex<Real> complex_normal(Rng &rng, Real variance)
    {
        std::normal_distribution<Real> n(Real(0), std::sqrt(variance / Real(2)));
        Real re = n(rng);
        Real im = n(rng);
        return {re, im};
    }
}

#endif
