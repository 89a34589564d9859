// Copyright 2026 The diracwalk Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "diracwalk/matrixkit.hpp"

namespace dw = diracwalk;
using dw::Mat2;
using dw::Mat4;
using dw::Rational;

namespace {

Rational random_rational(std::mt19937_64& g) {
    std::uniform_int_distribution<std::int64_t> num(-12, 12), den(1, 12);
    const auto n = num(g);
    return Rational(n, den(g));
}

Mat2 random_mat2(std::mt19937_64& g) {
    Mat2 m;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) m(r, c) = random_rational(g);
    return m;
}

std::array<Rational, 4> gamma_times(const std::array<Rational, 4>& p) { return dw::mat_vec(dw::gamma(), p); }

}  // namespace

TEST(Matrixkit, GammaInverseIsExact) {
    EXPECT_EQ(dw::gamma() * dw::gamma_inverse(), Mat4::identity());
    EXPECT_EQ(dw::gamma_inverse() * dw::gamma(), Mat4::identity());
}

TEST(Matrixkit, GammaOnBasisAndUniformVectors) {
    const Rational q(1, 4);
    const auto a = gamma_times({1, 0, 0, 0});
    EXPECT_EQ(a, (std::array<Rational, 4>{1, 0, 1, 1}));
    const auto b = gamma_times({q, q, q, q});
    EXPECT_EQ(b, (std::array<Rational, 4>{0, 0, 0, 1}));
}

TEST(Matrixkit, PauliSquares) {
    const Mat2 i = dw::identity2();
    EXPECT_EQ(dw::sigma_x() * dw::sigma_x(), i);
    EXPECT_EQ(dw::sigma_z() * dw::sigma_z(), i);
    EXPECT_EQ(dw::sigma_t() * dw::sigma_t(), -i);
}

TEST(Matrixkit, GInverse) {
    EXPECT_EQ(dw::g_matrix() * dw::g_inverse(), dw::identity2());
    EXPECT_EQ(dw::g_inverse() * dw::g_matrix(), dw::identity2());
}

TEST(Matrixkit, KronOfIdentityAndSigmaX) {
    const Mat4 k = dw::kron(dw::identity2(), dw::sigma_x());
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const bool one = (r == 0 && c == 1) || (r == 1 && c == 0) || (r == 2 && c == 3) || (r == 3 && c == 2);
            EXPECT_EQ(k(r, c), Rational(one ? 1 : 0)) << r << "," << c;
        }
    }
    EXPECT_EQ(dw::kron(dw::identity2(), dw::identity2()), Mat4::identity());
}

TEST(Matrixkit, KronOfHAndSigmaT) {
    // Blocks H(i,j) * sigma_t, row-major.
    const Mat4 expected{{0, -1, 0, 1}, {1, 0, -1, 0}, {0, 1, 0, -1}, {-1, 0, 1, 0}};
    EXPECT_EQ(dw::kron(dw::h_matrix(), dw::sigma_t()), expected);
}

TEST(Matrixkit, KronIsBilinear) {
    std::mt19937_64 g(7);
    for (int i = 0; i < 200; ++i) {
        const Rational alpha = random_rational(g);
        const Mat2 a = random_mat2(g), b = random_mat2(g), c = random_mat2(g);
        EXPECT_EQ(dw::kron(alpha * a + b, c), alpha * dw::kron(a, c) + dw::kron(b, c));
        EXPECT_EQ(dw::kron(c, alpha * a + b), alpha * dw::kron(c, a) + dw::kron(c, b));
    }
}

TEST(Matrixkit, KronMixedProduct) {
    std::mt19937_64 g(8);
    for (int i = 0; i < 50; ++i) {
        const Mat2 a = random_mat2(g), b = random_mat2(g), c = random_mat2(g), d = random_mat2(g);
        EXPECT_EQ(dw::kron(a, b) * dw::kron(c, d), dw::kron(a * c, b * d));
    }
}

TEST(Matrixkit, BlockSimilarityOfIdentityIsIdentity) {
    const dw::BlockPair bp{dw::identity2(), dw::identity2()};
    EXPECT_EQ(dw::block_similarity(bp), Mat4::identity());
    EXPECT_EQ(dw::compact_similarity(bp), Mat4::identity());
}

TEST(Matrixkit, BlockSimilarityOfSigmaTWithZeroAuxiliary) {
    const dw::BlockPair bp{dw::sigma_t(), Mat2::zero()};
    EXPECT_EQ(dw::block_similarity(bp), dw::half() * dw::kron(dw::h_matrix(), dw::sigma_t()));
}

TEST(Matrixkit, BlockSimilarityMatchesCompactFormOnRandomRationals) {
    std::mt19937_64 g(9);
    for (int i = 0; i < 300; ++i) {
        const dw::BlockPair bp{random_mat2(g), random_mat2(g)};
        EXPECT_EQ(dw::block_similarity(bp), dw::compact_similarity(bp));
    }
}

TEST(Matrixkit, PrintedCompactFormMissesHalfSigmaXKronRTilde) {
    std::mt19937_64 g(10);
    for (int i = 0; i < 100; ++i) {
        const dw::BlockPair bp{random_mat2(g), random_mat2(g)};
        const Mat4 gap = dw::block_similarity(bp) - dw::printed_compact_similarity(bp);
        EXPECT_EQ(gap, dw::half() * dw::kron(dw::sigma_x(), dw::tilde(bp.r)));
    }
}

TEST(Matrixkit, BlocksRoundTrip) {
    std::mt19937_64 g(11);
    const dw::BlockPair bp{random_mat2(g), random_mat2(g)};
    const Mat4 m = dw::block_diag(bp);
    EXPECT_EQ(dw::block(m, 0, 0), bp.s);
    EXPECT_EQ(dw::block(m, 1, 1), bp.r);
    EXPECT_EQ(dw::block(m, 0, 1), Mat2::zero());
    EXPECT_EQ(dw::untilde(dw::tilde(bp.r)), bp.r);
}

TEST(Matrixkit, CheckedAccessThrows) {
    Mat4 m;
    EXPECT_THROW(m.at(4, 0), std::out_of_range);
    EXPECT_THROW(m.at(0, 4), std::out_of_range);
    EXPECT_NO_THROW(m.at(3, 3));
}

TEST(Matrixkit, TransposeTraceAndColumnSums) {
    const Mat2 a{{1, 2}, {3, 4}};
    EXPECT_EQ(a.transpose(), (Mat2{{1, 3}, {2, 4}}));
    EXPECT_EQ(a.trace(), Rational(5));
    EXPECT_EQ(a.column_sums(), (std::array<Rational, 2>{4, 6}));
}

TEST(Matrixkit, CastToDoubleAndComplex) {
    const dw::Mat4d gd = dw::gamma_inverse().cast<double>();
    EXPECT_DOUBLE_EQ(gd(0, 0), 0.5);
    const dw::Mat4c gc = dw::gamma().cast<dw::Complex>();
    EXPECT_EQ(gc(2, 1), dw::Complex(-1.0, 0.0));
    EXPECT_EQ(dw::max_abs_diff(gd * dw::gamma().cast<double>(), dw::Mat4d::identity()), 0.0);
}
