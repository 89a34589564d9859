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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <boost/rational.hpp>

namespace diracwalk {

using Rational = boost::rational<std::int64_t>;
using Complex = std::complex<double>;

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

}  // namespace detail

// Scalar conversions between the three entry types used in this library:
// exact rationals, doubles and complex doubles.
template <typename To, typename From>
To scalar_cast(const From& v) {
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else if constexpr (std::is_same_v<From, Rational>) {
        const double d = boost::rational_cast<double>(v);
        return To(d);
    } else if constexpr (detail::is_complex<To>::value) {
        return To(v);
    } else {
        static_assert(!detail::is_complex<From>::value, "cannot narrow complex to real");
        return static_cast<To>(v);
    }
}

template <typename T>
double magnitude(const T& v) {
    if constexpr (std::is_same_v<T, Rational>) {
        return std::abs(boost::rational_cast<double>(v));
    } else {
        return std::abs(v);
    }
}

// Dense N x N matrix with value semantics. Dimensions are fixed by the type;
// at() is bounds checked, operator() is not.
template <typename T, std::size_t N>
class SquareMatrix {
public:
    using value_type = T;
    static constexpr std::size_t size = N;

    SquareMatrix() { entries_.fill(T(0)); }

    // Row-major nested initializer: {{a, b}, {c, d}}.
    SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) {
        entries_.fill(T(0));
        if (rows.size() != N) {
            throw std::invalid_argument("SquareMatrix: wrong number of rows");
        }
        std::size_t r = 0;
        for (const auto& row : rows) {
            if (row.size() != N) {
                throw std::invalid_argument("SquareMatrix: wrong number of columns");
            }
            std::size_t c = 0;
            for (const auto& v : row) {
                entries_[r * N + c] = v;
                ++c;
            }
            ++r;
        }
    }

    static SquareMatrix zero() { return SquareMatrix(); }

    static SquareMatrix identity() {
        SquareMatrix m;
        for (std::size_t i = 0; i < N; ++i) {
            m(i, i) = T(1);
        }
        return m;
    }

    T& operator()(std::size_t r, std::size_t c) { return entries_[r * N + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return entries_[r * N + c]; }

    T& at(std::size_t r, std::size_t c) {
        check(r, c);
        return entries_[r * N + c];
    }
    const T& at(std::size_t r, std::size_t c) const {
        check(r, c);
        return entries_[r * N + c];
    }

    SquareMatrix& operator+=(const SquareMatrix& o) {
        for (std::size_t i = 0; i < N * N; ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    SquareMatrix& operator-=(const SquareMatrix& o) {
        for (std::size_t i = 0; i < N * N; ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    SquareMatrix& operator*=(const T& s) {
        for (auto& e : entries_) e *= s;
        return *this;
    }

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator-(SquareMatrix a) { return a *= T(-1); }
    friend SquareMatrix operator*(SquareMatrix a, const T& s) { return a *= s; }
    friend SquareMatrix operator*(const T& s, SquareMatrix a) { return a *= s; }

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < N; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
        return a.entries_ == b.entries_;
    }

    SquareMatrix transpose() const {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    T trace() const {
        T s(0);
        for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
        return s;
    }

    // Sum over rows of each column (the "1 . M" row vector).
    std::array<T, N> column_sums() const {
        std::array<T, N> s;
        s.fill(T(0));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) s[j] += (*this)(i, j);
        return s;
    }

    template <typename U>
    SquareMatrix<U, N> cast() const {
        SquareMatrix<U, N> out;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) out(i, j) = scalar_cast<U>((*this)(i, j));
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& e : entries_) m = std::max(m, magnitude(e));
        return m;
    }

    const std::array<T, N * N>& entries() const { return entries_; }

private:
    static void check(std::size_t r, std::size_t c) {
        if (r >= N || c >= N) {
            throw std::out_of_range("SquareMatrix: index (" + std::to_string(r) + "," +
                                    std::to_string(c) + ") outside " + std::to_string(N) + "x" +
                                    std::to_string(N));
        }
    }

    std::array<T, N * N> entries_;
};

template <typename T, std::size_t N>
std::ostream& operator<<(std::ostream& os, const SquareMatrix<T, N>& m) {
    for (std::size_t i = 0; i < N; ++i) {
        os << (i == 0 ? "[[" : " [");
        for (std::size_t j = 0; j < N; ++j) {
            os << m(i, j) << (j + 1 < N ? ", " : "");
        }
        os << (i + 1 < N ? "]\n" : "]]");
    }
    return os;
}

// Max |a - b| over entries, computed in double.
template <typename T, typename U, std::size_t N>
double max_abs_diff(const SquareMatrix<T, N>& a, const SquareMatrix<U, N>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            if constexpr (detail::is_complex<T>::value || detail::is_complex<U>::value) {
                m = std::max(m, std::abs(scalar_cast<Complex>(a(i, j)) - scalar_cast<Complex>(b(i, j))));
            } else {
                m = std::max(m, std::abs(scalar_cast<double>(a(i, j)) - scalar_cast<double>(b(i, j))));
            }
        }
    }
    return m;
}

using Mat2 = SquareMatrix<Rational, 2>;
using Mat4 = SquareMatrix<Rational, 4>;
using Mat2d = SquareMatrix<double, 2>;
using Mat4d = SquareMatrix<double, 4>;
using Mat2c = SquareMatrix<Complex, 2>;
using Mat4c = SquareMatrix<Complex, 4>;

inline Rational half() { return Rational(1, 2); }

// ---------------------------------------------------------------------------
// Fixed 2x2 generators
// ---------------------------------------------------------------------------

inline Mat2 identity2() { return Mat2::identity(); }
inline Mat2 sigma_x() { return Mat2{{0, 1}, {1, 0}}; }
// -i sigma_y, real.
inline Mat2 sigma_t() { return Mat2{{0, -1}, {1, 0}}; }
inline Mat2 sigma_z() { return Mat2{{1, 0}, {0, -1}}; }
inline Mat2 g_matrix() { return Mat2{{1, -1}, {1, 1}}; }
inline Mat2 g_inverse() { return half() * Mat2{{1, 1}, {-1, 1}}; }
inline Mat2 h_matrix() { return Mat2{{1, -1}, {-1, 1}}; }
// All-ones 2x2, equal to I + sigma_x.
inline Mat2 j_matrix() { return Mat2{{1, 1}, {1, 1}}; }

// ---------------------------------------------------------------------------
// Kronecker product and block helpers
// ---------------------------------------------------------------------------

// Row-major block convention: block (i,j) of the result is a(i,j) * b.
template <typename T>
SquareMatrix<T, 4> kron(const SquareMatrix<T, 2>& a, const SquareMatrix<T, 2>& b) {
    SquareMatrix<T, 4> out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

// [[tl, tr], [bl, br]] assembled from 2x2 blocks.
template <typename T>
SquareMatrix<T, 4> from_blocks(const SquareMatrix<T, 2>& tl, const SquareMatrix<T, 2>& tr,
                               const SquareMatrix<T, 2>& bl, const SquareMatrix<T, 2>& br) {
    SquareMatrix<T, 4> out;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            out(i, j) = tl(i, j);
            out(i, j + 2) = tr(i, j);
            out(i + 2, j) = bl(i, j);
            out(i + 2, j + 2) = br(i, j);
        }
    }
    return out;
}

// Extract the 2x2 block at block coordinates (bi, bj) in {0,1}.
template <typename T>
SquareMatrix<T, 2> block(const SquareMatrix<T, 4>& m, std::size_t bi, std::size_t bj) {
    if (bi > 1 || bj > 1) throw std::out_of_range("block: block index must be 0 or 1");
    SquareMatrix<T, 2> out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out(i, j) = m(2 * bi + i, 2 * bj + j);
    return out;
}

// The linear map from occupation probabilities to the wavefunction:
// [[I, -I], [G, G]].
inline Mat4 gamma() {
    const Mat2 i2 = identity2();
    const Mat2 g = g_matrix();
    return from_blocks(i2, Mat2(-i2), g, g);
}

// 1/2 [[I, G^-1], [-I, G^-1]]
inline Mat4 gamma_inverse() {
    const Mat2 i2 = identity2();
    const Mat2 gi = g_inverse();
    return half() * from_blocks(i2, gi, Mat2(-i2), gi);
}

// G^-1 R G
template <typename T>
SquareMatrix<T, 2> tilde(const SquareMatrix<T, 2>& r) {
    return g_inverse().cast<T>() * r * g_matrix().cast<T>();
}

// Inverse of tilde(): G Rt G^-1.
template <typename T>
SquareMatrix<T, 2> untilde(const SquareMatrix<T, 2>& rt) {
    return g_matrix().cast<T>() * rt * g_inverse().cast<T>();
}

// Diagonal blocks of a block-diagonal 4x4 matrix.
template <typename T>
struct BasicBlockPair {
    SquareMatrix<T, 2> s;
    SquareMatrix<T, 2> r;
};

using BlockPair = BasicBlockPair<Rational>;

template <typename T>
SquareMatrix<T, 4> block_diag(const BasicBlockPair<T>& bp) {
    const SquareMatrix<T, 2> z;
    return from_blocks(bp.s, z, z, bp.r);
}

// Gamma^-1 blockdiag(S, R) Gamma, by direct multiplication.
template <typename T>
SquareMatrix<T, 4> block_similarity(const BasicBlockPair<T>& bp) {
    return gamma_inverse().cast<T>() * block_diag(bp) * gamma().cast<T>();
}

// Closed form of block_similarity: 1/2 H (x) S + 1/2 J (x) (G^-1 R G).
template <typename T>
SquareMatrix<T, 4> compact_similarity(const BasicBlockPair<T>& bp) {
    const T h(scalar_cast<T>(half()));
    return h * kron(h_matrix().cast<T>(), bp.s) + h * kron(j_matrix().cast<T>(), tilde(bp.r));
}

// The compact form with I in place of J, as it appears in some printed
// derivations. Differs from block_similarity by 1/2 sigma_x (x) tilde(R).
template <typename T>
SquareMatrix<T, 4> printed_compact_similarity(const BasicBlockPair<T>& bp) {
    const T h(scalar_cast<T>(half()));
    return h * kron(h_matrix().cast<T>(), bp.s) + h * kron(identity2().cast<T>(), tilde(bp.r));
}

// Apply a 4x4 matrix to a 4-vector.
template <typename T, typename V>
std::array<V, 4> mat_vec(const SquareMatrix<T, 4>& m, const std::array<V, 4>& v) {
    std::array<V, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        V acc(0);
        for (std::size_t j = 0; j < 4; ++j) acc += scalar_cast<V>(m(i, j)) * v[j];
        out[i] = acc;
    }
    return out;
}

}  // namespace diracwalk
