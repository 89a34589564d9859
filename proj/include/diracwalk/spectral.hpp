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

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diracwalk/matrixkit.hpp"
#include "diracwalk/transitions.hpp"
#include "diracwalk/wavefunction.hpp"

namespace diracwalk {

// Fourier symbol of the total transition operator. A mode exp(i(omega t + k x))
// is an eigenfunction of E(a,b) with eigenvalue exp(i(a omega + b k)); this
// is the convention of the transform kernel exp(-i(omega t + k x)). Arguments
// are in lattice units (omega dt, k dx).
template <typename T>
Mat4c symbol(const BasicTransitionSet<T>& ts, double omega, double k) {
    Mat4c out = ts.t00.template cast<Complex>();
    for (std::size_t i = 0; i < 4; ++i) {
        const Complex phase = std::polar(1.0, kLightConeHops[i].a * omega + kLightConeHops[i].b * k);
        out += phase * ts.hops[i].template cast<Complex>();
    }
    return out;
}

// The 2x2 lattice Dirac matrix [[1, (i/mu) sin(k - w)], [(i/mu) sin(k + w), 1]].
inline Mat2c dirac_symbol(double omega, double k, double mu) {
    const Complex i(0.0, 1.0);
    return Mat2c{{1.0, i / mu * std::sin(k - omega)}, {i / mu * std::sin(k + omega), 1.0}};
}

// det of dirac_symbol, written as the product of sines.
inline double dirac_determinant(double omega, double k, double mu) {
    return 1.0 + std::sin(k - omega) * std::sin(k + omega) / (mu * mu);
}

struct BlockCheck {
    double off_block_max = 0.0;         // max modulus of the two off-diagonal 2x2 blocks
    double upper_left_deviation = 0.0;  // max |UL + mu dirac_symbol|
    Mat2c upper_left;
    Mat2c lower_right;
};

// Gamma (T~ - mu I) Gamma^-1 for the unbiased walk, split into 2x2 blocks.
template <typename T>
BlockCheck block_check(const BasicTransitionSet<T>& ts, double omega, double k, double mu) {
    if (ts.epsilon != 0.0) throw std::invalid_argument("block_check: requires the unbiased transition set");
    const Mat4c shifted = symbol(ts, omega, k) - Complex(mu) * Mat4c::identity();
    const Mat4c conj = gamma().cast<Complex>() * shifted * gamma_inverse().cast<Complex>();
    BlockCheck out;
    out.off_block_max = std::max(block(conj, 0, 1).max_abs(), block(conj, 1, 0).max_abs());
    out.upper_left = block(conj, 0, 0);
    out.lower_right = block(conj, 1, 1);
    out.upper_left_deviation = max_abs_diff(out.upper_left, Complex(-mu) * dirac_symbol(omega, k, mu));
    return out;
}

inline BlockCheck block_check(double omega, double k, double mu) {
    return block_check(canonical_transitions(), omega, k, mu);
}

// ---------------------------------------------------------------------------
// Dispersion
// ---------------------------------------------------------------------------

// Principal root omega dt in [0, pi/2] of det = 0, i.e. sin^2(w) = sin^2(k) + mu^2,
// found by bisection on the product-of-sines determinant. Empty when no real
// root exists.
inline std::optional<double> lattice_dispersion(double k, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("lattice_dispersion: mu must lie in (0, 1)");
    auto f = [&](double w) { return mu * mu + std::sin(k - w) * std::sin(k + w); };
    double lo = 0.0;
    double hi = std::numbers::pi / 2.0;
    const double f_hi = f(hi);
    if (f_hi > 0.0) return std::nullopt;
    if (f_hi == 0.0) return hi;
    // f(0) = mu^2 + sin^2 k > 0 and f decreases on [0, pi/2].
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// arcsin(sqrt(sin^2 k + mu^2)), the same root in closed form.
inline std::optional<double> lattice_dispersion_closed_form(double k, double mu) {
    const double s2 = std::sin(k) * std::sin(k) + mu * mu;
    if (s2 > 1.0) return std::nullopt;
    return std::asin(std::sqrt(s2));
}

// Continuum energy-momentum relation in lattice units: sqrt(k^2 + mu^2).
inline double einstein_dispersion(double k, double mu) { return std::sqrt(k * k + mu * mu); }

struct DispersionPoint {
    double k = 0.0;
    double omega_lattice = std::numeric_limits<double>::quiet_NaN();
    double omega_einstein = 0.0;
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    bool in_regime = false;
    bool has_root() const { return !std::isnan(omega_lattice); }
};

// Pairs the lattice and continuum dispersion over `k_values`. A point is in
// the small-argument regime when both |k - w| and |k + w| are below
// `regime_threshold`.
inline std::vector<DispersionPoint> dispersion_error_map(double mu, const std::vector<double>& k_values,
                                                         double regime_threshold = 0.3) {
    std::vector<DispersionPoint> out;
    out.reserve(k_values.size());
    for (double k : k_values) {
        DispersionPoint p;
        p.k = k;
        p.omega_einstein = einstein_dispersion(k, mu);
        if (const auto w = lattice_dispersion(k, mu)) {
            p.omega_lattice = *w;
            p.rel_error = std::abs(*w / p.omega_einstein - 1.0);
            p.in_regime = std::max(std::abs(k - *w), std::abs(k + *w)) < regime_threshold;
        }
        out.push_back(p);
    }
    return out;
}

// `count` evenly spaced values covering [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
}

// ---------------------------------------------------------------------------
// Eigenmodes
// ---------------------------------------------------------------------------

enum class ModePart { real, imag };

struct Eigenmode {
    double k = 0.0;
    double omega = 0.0;
    double mu = 0.0;
    std::array<Complex, 4> amplitude{};  // probability-space null vector of (T~ - mu I), unit norm
    std::array<Complex, 4> psi{};        // Gamma * amplitude
    double null_residual = 0.0;          // ||(T~ - mu I) amplitude||
    double determinant = 0.0;            // of dirac_symbol at (omega, k)

    // Real or imaginary part of psi exp(i(omega t + k x)) on the lattice,
    // with (t0, x0) mapped to index (0, 0).
    WaveField sample(int nt, int nx, ModePart part = ModePart::real, int t0 = 0, int x0 = 0) const {
        WaveField w(nt, nx, "eigenmode k=" + std::to_string(k) + " mu=" + std::to_string(mu));
        for (int t = 0; t < nt; ++t) {
            for (int x = 0; x < nx; ++x) {
                const Complex phase = std::polar(1.0, omega * (t + t0) + k * (x + x0));
                for (int c = 0; c < 4; ++c) {
                    const Complex v = psi[static_cast<std::size_t>(c)] * phase;
                    w.psi(c, t, x) = part == ModePart::real ? v.real() : v.imag();
                }
            }
        }
        return w;
    }
};

inline std::optional<Eigenmode> eigenmode(double k, double mu) {
    const auto w = lattice_dispersion(k, mu);
    if (!w) return std::nullopt;
    Eigenmode m;
    m.k = k;
    m.omega = *w;
    m.mu = mu;
    // First row of dirac_symbol: psi1 + (i/mu) sin(k - w) psi2 = 0.
    const Complex i(0.0, 1.0);
    std::array<Complex, 4> psi{-i / mu * std::sin(k - m.omega), 1.0, 0.0, 0.0};
    auto amp = mat_vec(gamma_inverse(), psi);
    double norm = 0.0;
    for (const auto& v : amp) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (auto& v : amp) v /= norm;
    m.amplitude = amp;
    m.psi = mat_vec(gamma(), amp);

    const Mat4c shifted = symbol(canonical_transitions(), m.omega, k) - Complex(mu) * Mat4c::identity();
    const auto r = mat_vec(shifted, amp);
    double rn = 0.0;
    for (const auto& v : r) rn += std::norm(v);
    m.null_residual = std::sqrt(rn);
    m.determinant = dirac_determinant(m.omega, k, mu);
    return m;
}

// ---------------------------------------------------------------------------
// Second-order structure of the auxiliary block
// ---------------------------------------------------------------------------

// Least-squares fit of each entry of the exact lower-right block
// Gamma (T~ - mu I) Gamma^-1 over |w|, |k| <= h to
//   C + W1 w + K1 k + W2 w^2 + K2 k^2 + X w k.
struct SecondOrderFit {
    Mat2d constant;
    Mat2d omega1;
    Mat2d k1;
    Mat2d omega2;
    Mat2d k2;
    Mat2d cross;
    double max_imag = 0.0;        // the block is real for the unbiased walk
    double max_fit_residual = 0.0;
};

inline SecondOrderFit fit_auxiliary_block(double mu, double h = 1e-2, int points = 9) {
    if (points < 3) throw std::invalid_argument("fit_auxiliary_block: need at least 3 points per axis");
    const auto grid = linspace(-h, h, points);
    const auto ts = canonical_transitions();
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size() * grid.size());
    Eigen::MatrixXd basis(n, 6);
    std::array<Eigen::VectorXd, 4> rhs;
    for (auto& r : rhs) r.resize(n);
    SecondOrderFit fit;
    Eigen::Index row = 0;
    for (double w : grid) {
        for (double k : grid) {
            basis.row(row) << 1.0, w, k, w * w, k * k, w * k;
            const Mat2c lr = block_check(ts, w, k, mu).lower_right;
            for (int e = 0; e < 4; ++e) {
                const Complex v = lr(static_cast<std::size_t>(e / 2), static_cast<std::size_t>(e % 2));
                rhs[static_cast<std::size_t>(e)](row) = v.real();
                fit.max_imag = std::max(fit.max_imag, std::abs(v.imag()));
            }
            ++row;
        }
    }
    const auto qr = basis.colPivHouseholderQr();
    for (int e = 0; e < 4; ++e) {
        const Eigen::VectorXd c = qr.solve(rhs[static_cast<std::size_t>(e)]);
        const std::size_t r = static_cast<std::size_t>(e / 2), cc = static_cast<std::size_t>(e % 2);
        fit.constant(r, cc) = c(0);
        fit.omega1(r, cc) = c(1);
        fit.k1(r, cc) = c(2);
        fit.omega2(r, cc) = c(3);
        fit.k2(r, cc) = c(4);
        fit.cross(r, cc) = c(5);
        fit.max_fit_residual =
            std::max(fit.max_fit_residual, (basis * c - rhs[static_cast<std::size_t>(e)]).cwiseAbs().maxCoeff());
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Physical units
// ---------------------------------------------------------------------------

struct PhysicalUnits {
    double dx_m = 0.0;
    double dt_s = 0.0;
    double reduced_compton_m = 0.0;
    double compton_fraction = 0.0;  // dx / Compton wavelength = mu / 2 pi
};

// hbar c in eV m and hbar in eV s (CODATA 2018).
inline constexpr double kHbarCeVm = 1.973269804e-7;
inline constexpr double kHbareVs = 6.582119569e-16;

// dx = mu hbar / (m c), dt = mu hbar / (m c^2).
inline PhysicalUnits physical_units(double mass_eV, double mu) {
    if (!(mass_eV > 0.0)) throw std::invalid_argument("physical_units: mass must be positive");
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("physical_units: mu must lie in (0, 1]");
    PhysicalUnits u;
    u.reduced_compton_m = kHbarCeVm / mass_eV;
    u.dx_m = mu * u.reduced_compton_m;
    u.dt_s = mu * kHbareVs / mass_eV;
    u.compton_fraction = mu / (2.0 * std::numbers::pi);
    return u;
}

}  // namespace diracwalk
