// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_GEOMETRY_HPP
#define NFSEC_GEOMETRY_HPP

#include "nfsec/errors.hpp"
#include "nfsec/linalg.hpp"
#include "nfsec/rng.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace nfsec
{
    inline constexpr double speed_of_light = 299792458.0;

    using Position3 = Eigen::Vector3d; // meters

    // Planar N_d x N_e array in the xy-plane, centered at the origin.
    // Element (i, l) sits at row i, column l; channel vectors use row-major
    // order n = i * n_cols + l everywhere in the library.
    struct ArrayGeometry
    {
        int n_rows = 1;       // N_d
        int n_cols = 1;       // N_e
        double spacing = 0.0; // d [m]
        double carrier = 0.0; // f_c [Hz]

        double wavelength() const { return speed_of_light / carrier; }
        double wavenumber() const { return 2.0 * std::numbers::pi / wavelength(); }
        Eigen::Index element_count() const { return Eigen::Index(n_rows) * n_cols; }

        // Square array with half-wavelength spacing.
        static ArrayGeometry half_wavelength(int rows, int cols, double carrier_hz)
        {
            return {rows, cols, 0.5 * speed_of_light / carrier_hz, carrier_hz};
        }

        void validate() const
        {
            if (n_rows < 1 || n_cols < 1)
                throw ValidationError("array must have at least one row and one column");
            if (!(spacing > 0.0) || !(carrier > 0.0))
                throw ValidationError("array spacing and carrier must be positive");
        }
    };

    struct Scatterer
    {
        Position3 position = Position3::Zero();
        double variance = 1.0; // sigma_l^2 of the reflection coefficient
    };

    // Element coordinates as a 3 x N matrix (row-major element order).
    inline Eigen::Matrix3Xd element_position_matrix(const ArrayGeometry &geom)
    {
        geom.validate();
        Eigen::Matrix3Xd s(3, geom.element_count());
        const double x0 = 0.5 * double(geom.n_cols - 1);
        const double y0 = 0.5 * double(geom.n_rows - 1);
        for (int i = 0; i < geom.n_rows; ++i)
            for (int l = 0; l < geom.n_cols; ++l)
                s.col(Eigen::Index(i) * geom.n_cols + l) << (l - x0) * geom.spacing, (i - y0) * geom.spacing, 0.0;
        return s;
    }

    inline std::vector<Position3> element_positions(const ArrayGeometry &geom)
    {
        const Eigen::Matrix3Xd s = element_position_matrix(geom);
        std::vector<Position3> out;
        out.reserve(std::size_t(s.cols()));
        for (Eigen::Index n = 0; n < s.cols(); ++n)
            out.emplace_back(s.col(n));
        return out;
    }

    // 2 D^2 / lambda with D = sqrt(2) L and L the longer side, (n - 1) d.
    inline double fraunhofer_distance(const ArrayGeometry &geom)
    {
        geom.validate();
        const double side = double(std::max(geom.n_rows, geom.n_cols) - 1) * geom.spacing;
        const double aperture = std::sqrt(2.0) * side;
        return 2.0 * aperture * aperture / geom.wavelength();
    }

    // Near-field (NUSW) channel. Entries are stored as A e^{+j k |r - s|} so that
    // h^H f carries the propagation phase e^{-j k |r - s|}.
    template <typename Real = double>
    CVec<Real> los_channel(const ArrayGeometry &geom, const Position3 &r)
    {
        const Eigen::Matrix3Xd s = element_position_matrix(geom);
        const double lambda = geom.wavelength();
        const double k = geom.wavenumber();
        CVec<Real> h(s.cols());
        for (Eigen::Index n = 0; n < s.cols(); ++n)
        {
            const double dist = (r - s.col(n)).norm();
            if (!(dist > 0.0))
                throw CoincidentPosition("position coincides with array element " + std::to_string(n));
            h(n) = std::polar(Real(lambda / (4.0 * std::numbers::pi * dist)), Real(std::fmod(k * dist, 2.0 * std::numbers::pi)));
        }
        return h;
    }

    // Channel matrix whose columns are los_channel at each position.
    template <typename Real = double>
    CMat<Real> channel_matrix(const ArrayGeometry &geom, std::span<const Position3> positions)
    {
        CMat<Real> H(geom.element_count(), Eigen::Index(positions.size()));
        for (std::size_t m = 0; m < positions.size(); ++m)
            H.col(Eigen::Index(m)) = los_channel<Real>(geom, positions[m]);
        return H;
    }

    // Free-space scatterer-to-user coefficient (lambda / 4 pi d) e^{-j k d}.
    inline cplx scatterer_link_gain(const Scatterer &scat, const Position3 &r_user, const ArrayGeometry &geom)
    {
        const double dist = (scat.position - r_user).norm();
        if (!(dist > 0.0))
            throw CoincidentPosition("user coincides with scatterer");
        return std::polar(geom.wavelength() / (4.0 * std::numbers::pi * dist), -std::fmod(geom.wavenumber() * dist, 2.0 * std::numbers::pi));
    }

    // One draw of h = h_bar + sum_l alpha_l h_l h(r_l), alpha_l ~ CN(0, sigma_l^2).
    template <typename Real = double>
    CVec<Real> sample_multipath_channel(const ArrayGeometry &geom, const Position3 &r_user,
                                        std::span<const Scatterer> scatterers, Rng &rng)
    {
        CVec<Real> h = los_channel<Real>(geom, r_user);
        for (const Scatterer &sc : scatterers)
        {
            if (!(sc.variance > 0.0))
                throw DomainError("scatterer variance must be positive");
            const cplx alpha = complex_normal(rng, sc.variance);
            const cplx g = alpha * scatterer_link_gain(sc, r_user, geom);
            h += std::complex<Real>(g) * los_channel<Real>(geom, sc.position);
        }
        return h;
    }

    // R = sum_l sigma_l^2 |h_l|^2 h(r_l) h(r_l)^H
    template <typename Real = double>
    CMat<Real> multipath_covariance(const ArrayGeometry &geom, const Position3 &r_user,
                                    std::span<const Scatterer> scatterers)
    {
        const Eigen::Index n = geom.element_count();
        CMat<Real> R = CMat<Real>::Zero(n, n);
        for (const Scatterer &sc : scatterers)
        {
            const double w = sc.variance * std::norm(scatterer_link_gain(sc, r_user, geom));
            const CVec<Real> hs = los_channel<Real>(geom, sc.position);
            R.noalias() += Real(w) * hs * hs.adjoint();
        }
        return R;
    }
}

#endif
