// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef NFSEC_LINALG_HPP
#define NFSEC_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace nfsec
{
    // Dense complex/real types, templated on the real scalar (float or double).
    template <typename Real>
    using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    template <typename Real>
    using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
    template <typename Real>
    using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

    using CMatrix = CMat<double>;
    using CVector = CVec<double>;
    using RVector = RVec<double>;
    using cplx = std::complex<double>;

    // Relative Frobenius distance ||a - b|| / ||b||
    template <typename DA, typename DB>
    typename DA::RealScalar rel_frobenius(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b)
    {
        return (a - b).norm() / b.norm();
    }
}

#endif
