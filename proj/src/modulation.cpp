// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/modulation.hpp"
#include "nfsec/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace nfsec
{
    namespace
    {
        int gray(int i) { return i ^ (i >> 1); }

        std::vector<cplx> build_points(const ModulationScheme &mod)
        {
            const int n = mod.order;
            std::vector<cplx> pts(static_cast<std::size_t>(n));
            if (mod.kind == ModulationScheme::Kind::PSK)
            {
                const double offset = n == 4 ? std::numbers::pi / 4.0 : 0.0;
                for (int i = 0; i < n; ++i)
                    pts[std::size_t(gray(i))] = std::polar(1.0, offset + 2.0 * std::numbers::pi * i / n);
                return pts;
            }
            const int side = int(std::lround(std::sqrt(double(n))));
            const int axis_bits = std::countr_zero(unsigned(side));
            const double scale = 1.0 / std::sqrt(2.0 * (n - 1) / 3.0);
            for (int jy = 0; jy < side; ++jy)
                for (int jx = 0; jx < side; ++jx)
                {
                    const int label = gray(jx) | (gray(jy) << axis_bits);
                    pts[std::size_t(label)] = scale * cplx(2.0 * jx - side + 1, 2.0 * jy - side + 1);
                }
            return pts;
        }
    }

    ModulationScheme ModulationScheme::parse(const std::string &name)
    {
        std::string s;
        for (char c : name)
            if (c != '-' && c != '_' && c != ' ')
                s.push_back(char(std::toupper(static_cast<unsigned char>(c))));
        ModulationScheme m;
        if (s == "QPSK")
            m = qpsk();
        else if (s == "BPSK")
            m = psk(2);
        else
        {
            std::size_t digits = 0;
            while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits])))
                ++digits;
            const std::string tail = s.substr(digits);
            if (digits == 0 || (tail != "PSK" && tail != "QAM"))
                throw ValidationError("unknown modulation '" + name + "'");
            m.order = std::stoi(s.substr(0, digits));
            m.kind = tail == "PSK" ? Kind::PSK : Kind::QAM;
        }
        m.validate();
        return m;
    }

    std::string ModulationScheme::name() const
    {
        if (kind == Kind::PSK && order == 4)
            return "QPSK";
        if (kind == Kind::PSK && order == 2)
            return "BPSK";
        return std::to_string(order) + (kind == Kind::PSK ? "PSK" : "QAM");
    }

    int ModulationScheme::bits_per_symbol() const { return std::countr_zero(unsigned(order)); }

    void ModulationScheme::validate() const
    {
        const bool pow2 = order >= 2 && std::has_single_bit(unsigned(order));
        if (kind == Kind::PSK && (!pow2 || order > 1024))
            throw ValidationError("PSK order must be a power of two in [2, 1024]");
        if (kind == Kind::QAM && (!pow2 || order < 4 || bits_per_symbol() % 2 != 0 || order > 4096))
            throw ValidationError("QAM order must be an even power of two in [4, 4096]");
    }

    const std::vector<cplx> &ModulationScheme::points() const
    {
        static std::mutex lock;
        static std::map<std::pair<int, int>, std::vector<cplx>> cache;
        validate();
        const std::lock_guard guard(lock);
        const auto key = std::make_pair(int(kind), order);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, build_points(*this)).first;
        return it->second;
    }

    SymbolBlock gen_symbols(const ModulationScheme &mod, std::size_t count, Rng &rng)
    {
        const auto &pts = mod.points();
        std::uniform_int_distribution<int> pick(0, mod.order - 1);
        SymbolBlock out;
        out.labels.resize(count);
        out.symbols.resize(Eigen::Index(count));
        for (std::size_t i = 0; i < count; ++i)
        {
            out.labels[i] = pick(rng);
            out.symbols(Eigen::Index(i)) = pts[std::size_t(out.labels[i])];
        }
        return out;
    }

    std::vector<int> detect(const CVector &y, const ModulationScheme &mod, cplx gain)
    {
        if (!(std::abs(gain) > 0.0) || !std::isfinite(std::abs(gain)))
            throw DomainError("detection requires a finite non-zero gain reference");
        const auto &pts = mod.points();
        std::vector<int> labels(std::size_t(y.size()));
        for (Eigen::Index i = 0; i < y.size(); ++i)
        {
            const cplx z = y(i) / gain;
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (std::size_t p = 0; p < pts.size(); ++p)
            {
                const double d = std::norm(z - pts[p]);
                if (d < best)
                {
                    best = d;
                    arg = int(p);
                }
            }
            labels[std::size_t(i)] = arg;
        }
        return labels;
    }

    std::vector<std::uint8_t> labels_to_bits(const std::vector<int> &labels, const ModulationScheme &mod)
    {
        const int nb = mod.bits_per_symbol();
        std::vector<std::uint8_t> bits;
        bits.reserve(labels.size() * std::size_t(nb));
        for (int l : labels)
            for (int b = 0; b < nb; ++b)
                bits.push_back(std::uint8_t((l >> b) & 1));
        return bits;
    }

    std::vector<std::uint8_t> demodulate(const CVector &y, const ModulationScheme &mod, cplx gain)
    {
        return labels_to_bits(detect(y, mod, gain), mod);
    }
}
