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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "diracwalk/spectral.hpp"

namespace dw = diracwalk;
using dw::Complex;

TEST(Spectral, SymbolEntryIsHalfPhase) {
    const double w = 0.37, k = -0.81;
    const auto s = dw::symbol(dw::canonical_transitions(), w, k);
    // Entry (1,2) comes from T(1,-1).
    const Complex expected = 0.5 * std::polar(1.0, w - k);
    EXPECT_NEAR(std::abs(s(0, 1) - expected), 0.0, 1e-15);
}

TEST(Spectral, SymbolAtOriginIsHopSum) {
    const auto s = dw::symbol(dw::canonical_transitions(), 0.0, 0.0);
    const auto total = dw::canonical_transitions().total().cast<Complex>();
    EXPECT_EQ(dw::max_abs_diff(s, total), 0.0);
}

TEST(Spectral, BlockStructureOverGrid) {
    for (double mu : {0.05, 0.1, 0.5}) {
        for (int i = 0; i < 16; ++i) {
            for (int j = 0; j < 16; ++j) {
                const double w = -std::numbers::pi + 2.0 * std::numbers::pi * i / 16.0;
                const double k = -std::numbers::pi + 2.0 * std::numbers::pi * j / 16.0;
                const auto bc = dw::block_check(w, k, mu);
                EXPECT_LE(bc.off_block_max, 1e-12);
                EXPECT_LE(bc.upper_left_deviation, 1e-12);
            }
        }
    }
}

TEST(Spectral, LowerRightAtOrigin) {
    const double mu = 0.2;
    const auto lr = dw::block_check(0.0, 0.0, mu).lower_right;
    EXPECT_NEAR(std::abs(lr(0, 0) - Complex(-1.0 - mu)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lr(1, 1) - Complex(1.0 - mu)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lr(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(lr(1, 0)), 0.0, 1e-15);
}

TEST(Spectral, BlockCheckRejectsBiasedSet) {
    const auto b = dw::apply_bias(dw::canonical_transitions(), 0.1);
    EXPECT_THROW(dw::block_check(b, 0.0, 0.0, 0.1), std::invalid_argument);
}

TEST(Spectral, DispersionAtZeroMomentum) {
    const auto w = dw::lattice_dispersion(0.0, 0.6);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(*w, std::asin(0.6), 1e-14);
    EXPECT_NEAR(*w, 0.6435, 1e-4);
}

TEST(Spectral, NoRootPastTheBand) {
    // sin^2 k + mu^2 = 1.21
    const double k = std::asin(std::sqrt(1.21 - 0.36));
    EXPECT_FALSE(dw::lattice_dispersion(k, 0.6).has_value());
    EXPECT_FALSE(dw::lattice_dispersion_closed_form(k, 0.6).has_value());
}

TEST(Spectral, EinsteinTriple) {
    EXPECT_DOUBLE_EQ(dw::einstein_dispersion(0.3, 0.4), 0.5);
}

TEST(Spectral, BisectionMatchesClosedForm) {
    for (double mu : {0.01, 0.1, 0.5, 0.9}) {
        for (double k : dw::linspace(-1.5, 1.5, 61)) {
            const auto a = dw::lattice_dispersion(k, mu);
            const auto b = dw::lattice_dispersion_closed_form(k, mu);
            ASSERT_EQ(a.has_value(), b.has_value());
            if (a) {
                EXPECT_NEAR(*a, *b, 1e-12);
                EXPECT_NEAR(dw::dirac_determinant(*a, k, mu), 0.0, 1e-10);
            }
        }
    }
    EXPECT_THROW(dw::lattice_dispersion(0.0, 1.5), std::invalid_argument);
}

TEST(Spectral, RelativeErrorAtSmallMass) {
    const auto pts = dw::dispersion_error_map(0.05, {0.0});
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].rel_error, 4.2e-4, 0.1e-4);
    EXPECT_TRUE(pts[0].in_regime);
}

TEST(Spectral, ContinuumLimitAgreement) {
    for (const auto& p : dw::dispersion_error_map(0.05, dw::linspace(-0.1, 0.1, 41))) {
        ASSERT_TRUE(p.has_root());
        EXPECT_LE(p.rel_error, 0.01) << p.k;
    }
}

TEST(Spectral, RegimeFlag) {
    const auto pts = dw::dispersion_error_map(0.05, {0.05, 0.8});
    EXPECT_TRUE(pts[0].in_regime);
    EXPECT_FALSE(pts[1].in_regime);
    EXPECT_FALSE(dw::dispersion_error_map(0.05, {0.0}, 0.01).front().in_regime);
}

TEST(Spectral, ZeroMomentumErrorGrowsWithMass) {
    double prev = 0.0;
    for (double mu : {0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double r = dw::dispersion_error_map(mu, {0.0}).front().rel_error;
        EXPECT_GT(r, prev) << mu;
        prev = r;
    }
}

TEST(Spectral, LinspaceEndpoints) {
    const auto v = dw::linspace(-0.5, 0.5, 101);
    EXPECT_EQ(v.front(), -0.5);
    EXPECT_EQ(v.back(), 0.5);
    EXPECT_EQ(dw::linspace(2.0, 3.0, 1), std::vector<double>{2.0});
    EXPECT_THROW(dw::linspace(0, 1, 0), std::invalid_argument);
}

TEST(Spectral, EigenmodeIsNullVectorAndSolvesLatticeEquation) {
    for (double mu : {0.05, 0.3}) {
        for (double k : {0.0, 0.05, 0.4}) {
            const auto m = dw::eigenmode(k, mu);
            ASSERT_TRUE(m.has_value());
            EXPECT_LE(m->null_residual, 1e-12);
            // The sampled mode is not periodic on the grid, so only interior sites count.
            const auto w = m->sample(32, 32, dw::ModePart::real);
            EXPECT_LE(dw::exact_dirac_residual(w, mu, dw::EvalMode::interior).max_abs, 1e-10) << mu << " " << k;
            const auto wi = m->sample(32, 32, dw::ModePart::imag, 5, -7);
            EXPECT_LE(dw::exact_dirac_residual(wi, mu, dw::EvalMode::interior).max_abs, 1e-10);
        }
    }
}

TEST(Spectral, SlowEigenmodeNearlySolvesContinuumEquation) {
    const auto m = dw::eigenmode(0.05, 0.05);
    ASSERT_TRUE(m.has_value());
    const double slow = dw::continuum_dirac_residual(m->sample(64, 64), 0.05, dw::EvalMode::interior).relative();
    EXPECT_LE(slow, 0.05);
    const auto fast = dw::eigenmode(1.0, 0.05);
    EXPECT_GE(dw::continuum_dirac_residual(fast->sample(64, 64), 0.05, dw::EvalMode::interior).relative(), 10.0 * slow);
}

TEST(Spectral, SecondOrderFit) {
    const double mu = 0.1;
    const auto fit = dw::fit_auxiliary_block(mu);
    EXPECT_LE(fit.max_imag, 1e-14);
    // -mu R^(m) with R^(m) = diag(1 + 1/mu, 1 - 1/mu)
    EXPECT_NEAR(fit.constant(0, 0), -mu - 1.0, 1e-9);
    EXPECT_NEAR(fit.constant(1, 1), 1.0 - mu, 1e-9);
    // Quadratic terms carry the fourth-order truncation of the fit, about h^2.
    EXPECT_NEAR(fit.omega2(0, 0), 0.5, 1e-4);
    EXPECT_NEAR(fit.k2(1, 1), -0.5, 1e-4);
    EXPECT_NEAR(fit.omega1(0, 0), 0.0, 1e-9);
    EXPECT_NEAR(fit.k1(0, 1), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(fit.cross(0, 1)), 1.0, 1e-4);
    EXPECT_THROW(dw::fit_auxiliary_block(mu, 1e-2, 2), std::invalid_argument);
}

TEST(Spectral, PhysicalUnitsForElectron) {
    const auto u = dw::physical_units(510998.95, 0.1);
    EXPECT_NEAR(u.dx_m, 3.8616e-14, 1e-17);
    EXPECT_NEAR(u.compton_fraction, 0.0159, 1e-4);
    EXPECT_NEAR(u.dx_m / u.dt_s, 299792458.0, 1.0);
    EXPECT_NEAR(u.dx_m / u.reduced_compton_m, 0.1, 1e-15);
    EXPECT_THROW(dw::physical_units(0.0, 0.1), std::invalid_argument);
}
