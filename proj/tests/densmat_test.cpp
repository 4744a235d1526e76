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

#include "qdir/densmat.hpp"

#include <cmath>
#include <thread>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "qdir/random.hpp"

using namespace qdir;

namespace {

const SymmetricMatrix kRhoTheta = SymmetricMatrix::from_rows({{0.5, 0.0}, {0.0, 0.5}});
const SymmetricMatrix kSigma = SymmetricMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
const SymmetricMatrix kRho = SymmetricMatrix::from_rows({{0.5, 0.25}, {0.25, 0.5}});

template <class Fn>
ErrorCode error_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(SymmetricMatrix, SymmetrizesExactly) {
    DenseMatrix m(3, 3);
    m << 1.0, 0.1, 0.3, 0.2, 2.0, 0.7, 0.3000000001, 0.5, 3.0;
    const SymmetricMatrix s(m);
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 3; ++j) EXPECT_EQ(s(i, j), s(j, i));
    }
    EXPECT_EQ(error_of([] { SymmetricMatrix(DenseMatrix(2, 3)); }), ErrorCode::kInvalidArgument);
    EXPECT_EQ(error_of([] { SymmetricMatrix(DenseMatrix(0, 0)); }), ErrorCode::kInvalidArgument);
}

TEST(NewDensity, AcceptsWorkedMatrices) {
    for (const auto& m : {kRhoTheta, kSigma, kRho}) {
        const DensityMatrix rho = new_density(m);
        EXPECT_LE(max_abs_diff(rho.to_symmetric().dense(), m.dense()), 1e-15);
    }
}

TEST(NewDensity, RejectsBadTrace) {
    EXPECT_EQ(error_of([] { new_density(SymmetricMatrix::from_rows({{0.6, 0.0}, {0.0, 0.6}})); }),
              ErrorCode::kBadTrace);
}

TEST(NewDensity, RejectsNegativeEigenvalue) {
    // Eigenvalues 1.5 and -0.5.
    EXPECT_EQ(error_of([] { new_density(SymmetricMatrix::from_rows({{0.5, 1.0}, {1.0, 0.5}})); }),
              ErrorCode::kNotPsd);
}

TEST(NewDensity, ClampsTinyNegativeEigenvalues) {
    // Eigenvalues 1 + 5e-11 and -5e-11: inside PSD_TOL.
    const double eps = 5e-11;
    const DensityMatrix rho =
        new_density(SymmetricMatrix::from_rows({{0.5, 0.5 + eps}, {0.5 + eps, 0.5}}));
    const EigenDecomposition e = eigendecompose(rho);
    EXPECT_GE(e.values.minCoeff(), 0.0);
    EXPECT_NEAR(rho.to_symmetric().trace(), 1.0, 1e-15);
}

TEST(PureState, Examples) {
    const DensityMatrix s = pure_state(DenseVector{{1.0, 1.0}} / std::sqrt(2.0));
    EXPECT_TRUE(s.is_rank_one());
    EXPECT_LE(max_abs_diff(s.to_symmetric().dense(), kSigma.dense()), 1e-15);

    const DensityMatrix e1 = pure_state(DenseVector{{1.0, 0.0}});
    EXPECT_LE(max_abs_diff(e1.to_symmetric().dense(), SymmetricMatrix::from_rows({{1, 0}, {0, 0}}).dense()), 0.0);

    const DensityMatrix v = pure_state(DenseVector{{0.6, 0.8}});
    EXPECT_LE(max_abs_diff(v.to_symmetric().dense(), SymmetricMatrix::from_rows({{0.36, 0.48}, {0.48, 0.64}}).dense()),
              1e-15);
    EXPECT_EQ(error_of([] { pure_state(DenseVector::Zero(3)); }), ErrorCode::kZeroVector);
}

TEST(DiagonalDensity, Examples) {
    const DensityMatrix a = diagonal_density(DenseVector{{0.5, 0.5}});
    EXPECT_TRUE(a.is_diagonal());
    EXPECT_EQ(a(0, 0), 0.5);
    EXPECT_EQ(a(0, 1), 0.0);

    const DensityMatrix corner = diagonal_density(DenseVector{{1.0, 0.0, 0.0}});
    EXPECT_DOUBLE_EQ(purity(corner), 1.0);

    const DensityMatrix c = diagonal_density(DenseVector{{0.2, 0.3, 0.5}});
    const EigenDecomposition e = eigendecompose(c);
    EXPECT_EQ(e.values(0), 0.5);
    EXPECT_EQ(e.values(1), 0.3);
    EXPECT_EQ(e.values(2), 0.2);

    EXPECT_EQ(error_of([] { diagonal_density(DenseVector{{1.2, -0.2}}); }), ErrorCode::kNotDistribution);
    EXPECT_EQ(error_of([] { diagonal_density(DenseVector{{0.5, 0.6}}); }), ErrorCode::kNotDistribution);
}

TEST(Eigendecompose, WorkedMatrixMatchesCharacteristicPolynomial) {
    const auto [hi, lo] = oracle::eigen_2x2(0.5, 0.25, 0.5);
    const EigenDecomposition e = eigendecompose(new_density(kRho));
    EXPECT_NEAR(e.values(0), hi, 1e-12);
    EXPECT_NEAR(e.values(1), lo, 1e-12);
    EXPECT_NEAR(e.values(0), 0.75, 1e-12);
    EXPECT_NEAR(e.values(1), 0.25, 1e-12);
    const double r = 1.0 / std::sqrt(2.0);
    // First nonzero component positive.
    EXPECT_NEAR(e.vectors(0, 0), r, 1e-12);
    EXPECT_NEAR(e.vectors(1, 0), r, 1e-12);
    EXPECT_NEAR(e.vectors(0, 1), r, 1e-12);
    EXPECT_NEAR(e.vectors(1, 1), -r, 1e-12);
}

TEST(Eigendecompose, PureAndDiagonal) {
    const EigenDecomposition s = eigendecompose(new_density(kSigma));
    EXPECT_NEAR(s.values(0), 1.0, 1e-12);
    EXPECT_NEAR(s.values(1), 0.0, 1e-12);

    const EigenDecomposition d = eigendecompose(diagonal_density(DenseVector{{0.3, 0.7}}));
    EXPECT_EQ(d.values(0), 0.7);
    EXPECT_EQ(d.values(1), 0.3);
    EXPECT_EQ(d.vectors(1, 0), 1.0);
    EXPECT_EQ(d.vectors(0, 1), 1.0);
}

TEST(Eigendecompose, EqualEigenvaluesAreOrderedDeterministically) {
    const EigenDecomposition e = eigendecompose(new_density(kRhoTheta));
    // Both standard basis vectors; e_0 is lexicographically larger.
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-12);
    const EigenDecomposition again = eigendecompose(new_density(kRhoTheta));
    EXPECT_EQ(max_abs_diff(e.vectors, again.vectors), 0.0);
}

TEST(Eigendecompose, ReconstructsRandomDensitiesUpToDim200) {
    random::Rng rng(7);
    for (Index dim : {2, 3, 10, 50, 200}) {
        const DensityMatrix rho = new_density(random::density_matrix(rng, dim));
        const EigenDecomposition e = eigendecompose(rho);
        EXPECT_LE(max_abs_diff(e.vectors.transpose() * e.vectors, DenseMatrix::Identity(dim, dim)), 1e-8);
        EXPECT_LE(max_abs_diff(e.reconstruct(), rho.to_symmetric().dense()), 1e-8);
        EXPECT_NEAR(e.values.sum(), 1.0, 1e-9);
        EXPECT_GE(e.values.minCoeff(), 0.0);
        for (Index i = 1; i < dim; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
    }
}

TEST(MatrixLog, DiagonalAndWorkedMatrix) {
    const SupportLog d = matrix_log(diagonal_density(DenseVector{{0.5, 0.5}}));
    EXPECT_NEAR(d.log(0, 0), std::log(0.5), 1e-15);
    EXPECT_NEAR(d.log(1, 1), -0.6931471805599453, 1e-15);
    EXPECT_EQ(d.support_rank, 2);

    const SupportLog r = matrix_log(new_density(kRho));
    EXPECT_LE(max_abs_diff(r.log.dense(), oracle::log_m(kRho.dense())), 1e-12);
    const EigenDecomposition le = qdir::detail::decompose_symmetric(r.log.dense());
    EXPECT_NEAR(le.values(0), std::log(0.75), 1e-12);
    EXPECT_NEAR(le.values(1), std::log(0.25), 1e-12);
}

TEST(MatrixLog, PureStateRestrictsToSupport) {
    const SupportLog p = matrix_log(diagonal_density(DenseVector{{1.0, 0.0}}));
    EXPECT_EQ(p.support_rank, 1);
    EXPECT_LE(p.log.dense().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(p.support_projector(0, 0), 1.0);
    EXPECT_EQ(p.support_projector(1, 1), 0.0);
}

TEST(MatrixLog, MatchesSchurPadeLogOnFullRankDensities) {
    random::Rng rng(11);
    for (Index dim : {2, 4, 9}) {
        const SymmetricMatrix m = random::density_matrix(rng, dim, dim);
        EXPECT_LE(max_abs_diff(matrix_log(new_density(m)).log.dense(), oracle::log_m(m.dense())), 1e-8);
    }
}

TEST(MatrixSqrt, Examples) {
    const SymmetricMatrix d = matrix_sqrt(diagonal_density(DenseVector{{0.25, 0.75}}));
    EXPECT_DOUBLE_EQ(d(0, 0), 0.5);
    EXPECT_NEAR(d(1, 1), 0.8660254037844386, 1e-15);
    EXPECT_EQ(d(0, 1), 0.0);

    const DensityMatrix p = pure_state(DenseVector{{0.6, 0.8}});
    EXPECT_LE(max_abs_diff(matrix_sqrt(p).dense(), p.to_symmetric().dense()), 0.0);
    // Same state through the general layout.
    EXPECT_LE(max_abs_diff(matrix_sqrt(new_density(p.to_symmetric())).dense(), p.to_symmetric().dense()), 1e-12);

    const SymmetricMatrix r = matrix_sqrt(new_density(kRho));
    EXPECT_LE(max_abs_diff(r.dense(), oracle::sqrt_m(kRho.dense())), 1e-12);
    EXPECT_LE(max_abs_diff(r.dense() * r.dense(), kRho.dense()), 1e-12);
}

TEST(TraceProduct, Examples) {
    EXPECT_DOUBLE_EQ(trace_product(kRhoTheta, SymmetricMatrix::from_rows({{1, 0}, {0, 0}})), 0.5);
    EXPECT_DOUBLE_EQ(trace_product(kSigma, kSigma), 1.0);
    EXPECT_DOUBLE_EQ(trace_product(kRho, kSigma), 0.75);
    EXPECT_EQ(error_of([] { trace_product(kRho, SymmetricMatrix::identity(3)); }), ErrorCode::kDimensionMismatch);
}

TEST(Purity, Examples) {
    EXPECT_NEAR(purity(new_density(kSigma)), 1.0, 1e-12);
    EXPECT_TRUE(is_pure(new_density(kSigma)));
    EXPECT_DOUBLE_EQ(purity(diagonal_density(DenseVector{{0.5, 0.5}})), 0.5);
    EXPECT_NEAR(purity(new_density(kRho)), 0.625, 1e-12);
    EXPECT_FALSE(is_pure(new_density(kRho)));
    EXPECT_FALSE(is_pure(new_density(kRhoTheta)));
}

TEST(Bloch, Examples) {
    const BlochPoint c = bloch_coordinates(diagonal_density(DenseVector{{0.5, 0.5}}));
    EXPECT_EQ(c.x, 0.0);
    EXPECT_EQ(c.y, 0.0);
    EXPECT_EQ(c.z, 0.0);

    const BlochPoint s = bloch_coordinates(new_density(kSigma));
    EXPECT_DOUBLE_EQ(s.x, 1.0);
    EXPECT_DOUBLE_EQ(s.z, 0.0);

    const BlochPoint pole = bloch_coordinates(diagonal_density(DenseVector{{1.0, 0.0}}));
    EXPECT_EQ(pole.x, 0.0);
    EXPECT_EQ(pole.z, 1.0);

    EXPECT_EQ(error_of([] { bloch_coordinates(diagonal_density(DenseVector{{0.2, 0.3, 0.5}})); }),
              ErrorCode::kWrongDimension);
}

// Property: every construction path yields a valid density.
TEST(DensityProperties, RandomConstructionsAreValid) {
    random::Rng rng(2024);
    std::uniform_int_distribution<Index> dims(1, 12);
    for (int s = 0; s < 1000; ++s) {
        const Index dim = dims(rng);
        const DensityMatrix rho = s % 3 == 0   ? new_density(random::density_matrix(rng, dim))
                                  : s % 3 == 1 ? pure_state(random::unit(rng, dim))
                                               : diagonal_density(random::distribution(rng, dim));
        const DenseMatrix m = rho.to_symmetric().dense();
        ASSERT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
        ASSERT_NEAR(m.trace(), 1.0, 1e-9);
        ASSERT_GE(eigendecompose(rho).values.minCoeff(), 0.0);
    }
}

TEST(DensityProperties, PurityBounds) {
    random::Rng rng(5);
    for (Index dim : {2, 7, 30}) {
        for (int s = 0; s < 20; ++s) {
            EXPECT_NEAR(purity(pure_state(random::unit(rng, dim))), 1.0, 1e-9);
            const double p = purity(new_density(random::density_matrix(rng, dim)));
            EXPECT_GE(p, 1.0 / static_cast<double>(dim) - 1e-12);
            EXPECT_LE(p, 1.0 + 1e-12);
        }
        EXPECT_NEAR(purity(diagonal_density(DenseVector::Constant(dim, 1.0 / static_cast<double>(dim)))),
                    1.0 / static_cast<double>(dim), 1e-9);
    }
}

TEST(DensityProperties, SqrtSquaresAndLogExponentiates) {
    random::Rng rng(99);
    for (Index dim : {2, 5, 20}) {
        for (int s = 0; s < 5; ++s) {
            const DensityMatrix rho = new_density(random::density_matrix(rng, dim));
            const DenseMatrix m = rho.to_symmetric().dense();
            const DenseMatrix root = matrix_sqrt(rho).dense();
            EXPECT_LE(max_abs_diff(root * root, m), 1e-8);

            const SupportLog log = matrix_log(rho);
            const DenseMatrix exp_log = log.log.dense().exp();
            const DenseMatrix off_support = DenseMatrix::Identity(dim, dim) - log.support_projector.dense();
            EXPECT_LE(max_abs_diff(exp_log - off_support, m), 1e-8);
        }
    }
}

TEST(DensityProperties, BlochBijectionAndRegions) {
    random::Rng rng(3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < 200; ++s) {
        const DensityMatrix rho = new_density(random::density_matrix(rng, 2));
        const BlochPoint p = bloch_coordinates(rho);
        EXPECT_EQ(p.y, 0.0);
        EXPECT_LE(p.norm(), 1.0 + 1e-12);
        EXPECT_LE(max_abs_diff(from_bloch(p).dense(), rho.to_symmetric().dense()), 1e-10);

        const double t = u01(rng);
        EXPECT_EQ(bloch_coordinates(diagonal_density(DenseVector{{t, 1.0 - t}})).x, 0.0);

        const BlochPoint q = bloch_coordinates(pure_state(random::nonnegative_unit(rng, 2, 1.0)));
        EXPECT_GE(q.x, 0.0);
        EXPECT_NEAR(q.norm(), 1.0, 1e-9);
    }
}

TEST(DensityProperties, ConcurrentReadsAgree) {
    random::Rng rng(1);
    const DensityMatrix rho = new_density(random::density_matrix(rng, 30));
    const double expected = purity(rho);
    std::vector<double> seen(8);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < seen.size(); ++t) {
        pool.emplace_back([&, t] { seen[t] = purity(rho) + eigendecompose(rho).values.sum() - 1.0; });
    }
    for (auto& th : pool) th.join();
    for (double v : seen) EXPECT_NEAR(v, expected, 1e-12);
}
