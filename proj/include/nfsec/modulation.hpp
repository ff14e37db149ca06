// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_MODULATION_HPP
#define NFSEC_MODULATION_HPP

#include "nfsec/linalg.hpp"
#include "nfsec/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfsec
{
    // Gray-labelled PSK or square QAM constellation with unit average energy.
    struct ModulationScheme
    {
        enum class Kind
        {
            PSK,
            QAM
        };
        Kind kind = Kind::PSK;
        int order = 4;

        static ModulationScheme qpsk() { return {Kind::PSK, 4}; }
        static ModulationScheme psk(int order) { return {Kind::PSK, order}; }
        static ModulationScheme qam(int order) { return {Kind::QAM, order}; }

        // "QPSK", "8PSK", "16QAM", ... (case-insensitive, '-' ignored)
        static ModulationScheme parse(const std::string &name);
        std::string name() const;

        int bits_per_symbol() const;
        void validate() const;

        // points()[label] is the constellation point carrying that Gray label.
        const std::vector<cplx> &points() const;

        bool operator==(const ModulationScheme &) const = default;
    };

    struct SymbolBlock
    {
        std::vector<int> labels;
        CVector symbols;
    };

    // i.i.d. uniform constellation points.
    SymbolBlock gen_symbols(const ModulationScheme &mod, std::size_t count, Rng &rng);

    // Minimum-distance decision on y / gain; returns labels.
    std::vector<int> detect(const CVector &y, const ModulationScheme &mod, cplx gain);

    // Minimum-distance decision followed by Gray unmapping, bits LSB first per symbol.
    std::vector<std::uint8_t> demodulate(const CVector &y, const ModulationScheme &mod, cplx gain);

    std::vector<std::uint8_t> labels_to_bits(const std::vector<int> &labels, const ModulationScheme &mod);
}

#endif
