// Copyright 2026 The qdir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Random instances for property checks. All draws go through one
// std::mt19937_64 so a seed fixes every instance.

#include <random>

#include <Eigen/QR>

#include "qdir/densmat.hpp"

namespace qdir::random {

using Rng = std::mt19937_64;

inline DenseMatrix gaussian(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> n01(0.0, 1.0);
    DenseMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
    }
    return m;
}

/// Columns form a Haar-ish random orthonormal basis.
inline DenseMatrix orthonormal_basis(Rng& rng, Index dim) {
    Eigen::HouseholderQR<DenseMatrix> qr(gaussian(rng, dim, dim));
    return qr.householderQ() * DenseMatrix::Identity(dim, dim);
}

/// A A^T / tr(A A^T) with A of shape dim x rank.
inline SymmetricMatrix density_matrix(Rng& rng, Index dim, Index rank) {
    const DenseMatrix a = gaussian(rng, dim, rank);
    DenseMatrix m = a * a.transpose();
    return SymmetricMatrix(m / m.trace());
}

/// Random rank in [1, dim].
inline SymmetricMatrix density_matrix(Rng& rng, Index dim) {
    std::uniform_int_distribution<Index> pick(1, dim);
    return density_matrix(rng, dim, pick(rng));
}

/// Full-support probability vector (flat Dirichlet).
inline DenseVector distribution(Rng& rng, Index dim) {
    std::exponential_distribution<double> e(1.0);
    DenseVector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = e(rng) + 1e-6;
    return v / v.sum();
}

/// Unit vector in the nonnegative orthant; each entry nonzero with
/// probability `fill`, at least one nonzero.
inline DenseVector nonnegative_unit(Rng& rng, Index dim, double fill = 0.5) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<Index> pick(0, dim - 1);
    DenseVector v = DenseVector::Zero(dim);
    for (Index i = 0; i < dim; ++i) {
        if (u01(rng) < fill) v(i) = u01(rng);
    }
    if (v.norm() < kZeroNormTol) v(pick(rng)) = 1.0;
    return v / v.norm();
}

inline DenseVector unit(Rng& rng, Index dim) {
    DenseVector v = gaussian(rng, dim, 1);
    return v / v.norm();
}

}  // namespace qdir::random
