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

// Real symmetric density matrices and the matrix functions built on their
// eigendecomposition.
//
// A DensityMatrix is stored in one of three layouts:
//   - diagonal: only the weight vector is kept (language-model states),
//   - rank one: only the sparse unit vector is kept (vector-space states),
//   - general:  dense storage with the eigendecomposition computed at
//               construction.
// Structured layouts are never materialized unless a caller asks for the
// dense matrix explicitly.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "qdir/error.hpp"

namespace qdir {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kPureTol = 1e-9;
inline constexpr double kZeroNormTol = 1e-12;

using Index = Eigen::Index;
using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseVector = Eigen::SparseVector<double>;

/// Square real matrix with entries[i][j] == entries[j][i] bit-for-bit.
class SymmetricMatrix {
  public:
    explicit SymmetricMatrix(const DenseMatrix& m) {
        if (m.rows() < 1 || m.rows() != m.cols()) {
            throw Error(ErrorCode::kInvalidArgument,
                        "symmetric matrix must be square with dim >= 1, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        }
        // (a + b) * 0.5 == (b + a) * 0.5 in IEEE arithmetic, so this is exact.
        m_ = (m + m.transpose()) * 0.5;
    }

    static SymmetricMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const auto n = static_cast<Index>(rows.size());
        DenseMatrix m = DenseMatrix::Zero(n, n);
        Index i = 0;
        for (const auto& row : rows) {
            if (static_cast<Index>(row.size()) != n) {
                throw Error(ErrorCode::kInvalidArgument, "ragged matrix literal");
            }
            Index j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        return SymmetricMatrix(m);
    }

    static SymmetricMatrix identity(Index dim) { return SymmetricMatrix(DenseMatrix::Identity(dim, dim)); }

    Index dim() const noexcept { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }
    const DenseMatrix& dense() const noexcept { return m_; }
    double trace() const { return m_.trace(); }

  private:
    DenseMatrix m_;
};

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns. Each eigenvector has its first nonzero component positive and
/// equal eigenvalues are ordered by lexicographically larger vector first,
/// so decompositions are reproducible.
struct EigenDecomposition {
    DenseVector values;
    DenseMatrix vectors;

    Index dim() const noexcept { return values.size(); }

    DenseMatrix reconstruct() const {
        return vectors * values.asDiagonal() * vectors.transpose();
    }
};

namespace detail {

inline void normalize_sign(Eigen::Ref<DenseVector> v) {
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > kSupportTol) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

inline bool lexicographically_greater(const DenseVector& a, const DenseVector& b) {
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return a(i) > b(i);
    }
    return false;
}

inline EigenDecomposition decompose_symmetric(const DenseMatrix& m) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::kConvergenceFailure,
                    "symmetric eigensolver failed at dim " + std::to_string(m.rows()));
    }
    const Index n = m.rows();
    DenseMatrix raw = solver.eigenvectors();
    for (Index j = 0; j < n; ++j) normalize_sign(raw.col(j));

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const DenseVector& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (ev(a) != ev(b)) return ev(a) > ev(b);
        return lexicographically_greater(raw.col(a), raw.col(b));
    });

    EigenDecomposition out{DenseVector(n), DenseMatrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        out.values(k) = ev(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = raw.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

inline SymmetricMatrix spectral_function(const EigenDecomposition& e, const DenseVector& mapped) {
    return SymmetricMatrix(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

}  // namespace detail

class DensityMatrix;
DensityMatrix new_density(const SymmetricMatrix& m);
DensityMatrix pure_state(const SparseVector& v);
DensityMatrix diagonal_density(const DenseVector& theta);

/// Symmetric PSD trace-one matrix. Immutable after construction.
class DensityMatrix {
  public:
    enum class Structure { kGeneral, kDiagonal, kRankOne };

    Structure structure() const noexcept { return structure_; }
    bool is_diagonal() const noexcept { return structure_ == Structure::kDiagonal; }
    bool is_rank_one() const noexcept { return structure_ == Structure::kRankOne; }
    Index dim() const noexcept { return dim_; }

    double operator()(Index i, Index j) const {
        switch (structure_) {
            case Structure::kDiagonal: return i == j ? weights_(i) : 0.0;
            case Structure::kRankOne: return state_.coeff(i) * state_.coeff(j);
            case Structure::kGeneral: break;
        }
        return (*dense_)(i, j);
    }

    /// Diagonal layout only: the probability vector on the diagonal.
    const DenseVector& diagonal_weights() const { return weights_; }
    /// Rank-one layout only: the unit vector v with rho = v v^T.
    const SparseVector& state_vector() const { return state_; }

    SymmetricMatrix to_symmetric() const {
        switch (structure_) {
            case Structure::kDiagonal: return SymmetricMatrix(DenseMatrix(weights_.asDiagonal()));
            case Structure::kRankOne: {
                DenseVector v = DenseVector(state_);
                return SymmetricMatrix(v * v.transpose());
            }
            case Structure::kGeneral: break;
        }
        return *dense_;
    }

    /// Eigendecomposition cached at construction (general layout only).
    const std::shared_ptr<const EigenDecomposition>& cached_eigen() const noexcept { return eigen_; }

  private:
    DensityMatrix() = default;

    Structure structure_ = Structure::kGeneral;
    Index dim_ = 0;
    DenseVector weights_;
    SparseVector state_;
    std::shared_ptr<const SymmetricMatrix> dense_;
    std::shared_ptr<const EigenDecomposition> eigen_;

    friend DensityMatrix new_density(const SymmetricMatrix& m);
    friend DensityMatrix pure_state(const SparseVector& v);
    friend DensityMatrix diagonal_density(const DenseVector& theta);
};

/// Validates m as a density. Eigenvalues in [-kPsdTol, 0) are clamped to 0
/// and the trace is renormalized to 1.
inline DensityMatrix new_density(const SymmetricMatrix& m) {
    const double tr = m.trace();
    if (!(std::abs(tr - 1.0) <= kTraceTol)) {
        throw Error(ErrorCode::kBadTrace, "trace " + std::to_string(tr) + " differs from 1");
    }
    EigenDecomposition eig = detail::decompose_symmetric(m.dense());
    const double min_eig = eig.values(eig.dim() - 1);
    if (min_eig < -kPsdTol) {
        throw Error(ErrorCode::kNotPsd, "eigenvalue " + std::to_string(min_eig) + " below -PSD_TOL");
    }

    DensityMatrix out;
    out.structure_ = DensityMatrix::Structure::kGeneral;
    out.dim_ = m.dim();
    if (min_eig < 0.0) {
        eig.values = eig.values.cwiseMax(0.0);
        eig.values /= eig.values.sum();
        out.dense_ = std::make_shared<const SymmetricMatrix>(eig.reconstruct());
    } else {
        out.dense_ = std::make_shared<const SymmetricMatrix>(m.dense() / tr);
        eig.values /= tr;
    }
    out.eigen_ = std::make_shared<const EigenDecomposition>(std::move(eig));
    return out;
}

/// Rank-one density v v^T; v is renormalized to unit length.
inline DensityMatrix pure_state(const SparseVector& v) {
    const double norm = v.norm();
    if (!(norm >= kZeroNormTol)) {
        throw Error(ErrorCode::kZeroVector, "cannot build a pure state from a zero vector");
    }
    DensityMatrix out;
    out.structure_ = DensityMatrix::Structure::kRankOne;
    out.dim_ = v.size();
    out.state_ = v / norm;
    return out;
}

inline DensityMatrix pure_state(const DenseVector& v) { return pure_state(SparseVector(v.sparseView(0.0))); }

/// diag(theta). theta must be a probability vector within kTraceTol.
inline DensityMatrix diagonal_density(const DenseVector& theta) {
    if (theta.size() < 1) {
        throw Error(ErrorCode::kNotDistribution, "empty probability vector");
    }
    for (Index i = 0; i < theta.size(); ++i) {
        if (!(theta(i) >= 0.0)) {
            throw Error(ErrorCode::kNotDistribution,
                        "negative entry " + std::to_string(theta(i)) + " at index " + std::to_string(i));
        }
    }
    const double sum = theta.sum();
    if (!(std::abs(sum - 1.0) <= kTraceTol)) {
        throw Error(ErrorCode::kNotDistribution, "entries sum to " + std::to_string(sum));
    }
    DensityMatrix out;
    out.structure_ = DensityMatrix::Structure::kDiagonal;
    out.dim_ = theta.size();
    out.weights_ = theta / sum;
    return out;
}

inline EigenDecomposition eigendecompose(const DensityMatrix& rho) {
    switch (rho.structure()) {
        case DensityMatrix::Structure::kGeneral: return *rho.cached_eigen();
        case DensityMatrix::Structure::kDiagonal: {
            // Standard basis vectors: for equal weights the lower index is
            // lexicographically larger and therefore comes first.
            const DenseVector& w = rho.diagonal_weights();
            std::vector<Index> order(static_cast<std::size_t>(w.size()));
            std::iota(order.begin(), order.end(), Index{0});
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w(a) > w(b); });
            const Index n = w.size();
            EigenDecomposition out{DenseVector(n), DenseMatrix::Zero(n, n)};
            for (Index k = 0; k < n; ++k) {
                out.values(k) = w(order[static_cast<std::size_t>(k)]);
                out.vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
            }
            return out;
        }
        case DensityMatrix::Structure::kRankOne: {
            EigenDecomposition out = detail::decompose_symmetric(rho.to_symmetric().dense());
            out.values.setZero();
            out.values(0) = 1.0;
            return out;
        }
    }
    return {};
}

/// Support-restricted matrix logarithm.
struct SupportLog {
    SymmetricMatrix log;
    SymmetricMatrix support_projector;
    Index support_rank = 0;
};

inline SupportLog matrix_log(const DensityMatrix& rho) {
    const EigenDecomposition e = eigendecompose(rho);
    DenseVector logs = DenseVector::Zero(e.dim());
    DenseVector support = DenseVector::Zero(e.dim());
    Index rank = 0;
    for (Index i = 0; i < e.dim(); ++i) {
        if (e.values(i) > kSupportTol) {
            logs(i) = std::log(e.values(i));
            support(i) = 1.0;
            ++rank;
        }
    }
    return SupportLog{detail::spectral_function(e, logs), detail::spectral_function(e, support), rank};
}

/// PSD square root. Eigenvalues at or below kSupportTol map to 0.
inline SymmetricMatrix matrix_sqrt(const DensityMatrix& rho) {
    switch (rho.structure()) {
        case DensityMatrix::Structure::kDiagonal:
            return SymmetricMatrix(DenseMatrix(rho.diagonal_weights().cwiseSqrt().asDiagonal()));
        case DensityMatrix::Structure::kRankOne: return rho.to_symmetric();
        case DensityMatrix::Structure::kGeneral: break;
    }
    const EigenDecomposition& e = *rho.cached_eigen();
    DenseVector roots = e.values.unaryExpr([](double x) { return x > kSupportTol ? std::sqrt(x) : 0.0; });
    return detail::spectral_function(e, roots);
}

/// tr(a b) for symmetric a, b, computed as the entrywise sum of products.
inline double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "trace_product of dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    return a.dense().cwiseProduct(b.dense()).sum();
}

inline double purity(const DensityMatrix& rho) {
    switch (rho.structure()) {
        case DensityMatrix::Structure::kDiagonal: return rho.diagonal_weights().squaredNorm();
        case DensityMatrix::Structure::kRankOne: {
            const double n2 = rho.state_vector().squaredNorm();
            return n2 * n2;
        }
        case DensityMatrix::Structure::kGeneral: break;
    }
    return rho.cached_eigen()->values.squaredNorm();
}

inline bool is_pure(const DensityMatrix& rho) { return purity(rho) >= 1.0 - kPureTol; }

struct BlochPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// For rho = [[a, b], [b, 1 - a]] returns (2b, 0, 2a - 1).
inline BlochPoint bloch_coordinates(const DensityMatrix& rho) {
    if (rho.dim() != 2) {
        throw Error(ErrorCode::kWrongDimension, "Bloch coordinates need dim 2, got " + std::to_string(rho.dim()));
    }
    return BlochPoint{2.0 * rho(0, 1), 0.0, 2.0 * rho(0, 0) - 1.0};
}

/// Inverse of bloch_coordinates for real states: (I + x X + z Z) / 2.
inline SymmetricMatrix from_bloch(const BlochPoint& p) {
    return SymmetricMatrix::from_rows({{0.5 * (1.0 + p.z), 0.5 * p.x}, {0.5 * p.x, 0.5 * (1.0 - p.z)}});
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qdir
