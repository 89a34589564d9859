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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "diracwalk/detail/summation.hpp"
#include "diracwalk/lattice.hpp"
#include "diracwalk/matrixkit.hpp"

namespace diracwalk {

// Four real components psi_1..psi_4 over the lattice. Unnormalized.
struct WaveField {
    Grid4 psi;
    std::string provenance;

    WaveField() = default;
    WaveField(int nt, int nx, std::string provenance_ = {}) : psi(nt, nx), provenance(std::move(provenance_)) {}

    int nt() const { return psi.nt(); }
    int nx() const { return psi.nx(); }

    double scale() const {
        double m = 0.0;
        for (double v : psi.values()) m = std::max(m, std::abs(v));
        return m;
    }
};

namespace detail {

inline Grid4 apply_sitewise(const Grid4& in, const Mat4d& m) {
    Grid4 out(in.nt(), in.nx());
    const std::size_t n = in.plane_size();
    std::array<std::span<const double>, 4> src{in.plane(0), in.plane(1), in.plane(2), in.plane(3)};
    std::array<std::span<double>, 4> dst{out.plane(0), out.plane(1), out.plane(2), out.plane(3)};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double w = m(r, c);
            if (w == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) dst[r][i] += w * src[c][i];
        }
    }
    return out;
}

}  // namespace detail

// psi = Gamma pbar at every site.
inline WaveField extract(const ProbField& pbar, std::string provenance = {}) {
    WaveField w;
    w.psi = detail::apply_sitewise(pbar.p, gamma().cast<double>());
    w.provenance = std::move(provenance);
    return w;
}

// Inverse of extract(): p = Gamma^-1 psi.
inline ProbField to_probabilities(const WaveField& w) {
    ProbField f;
    f.p = detail::apply_sitewise(w.psi, gamma_inverse().cast<double>());
    return f;
}

// The four states relabelled by two binary quantum numbers (j, s):
// p = {pi_1(+1), pi_2(+1), pi_1(-1), pi_2(-1)}.
class PolarizationView {
public:
    explicit PolarizationView(const ProbField& f) : field_(&f) {}

    // j in {1, 2}, s in {-1, +1}.
    double operator()(int j, int s, int t, int x) const {
        if ((j != 1 && j != 2) || (s != 1 && s != -1)) {
            throw std::out_of_range("PolarizationView: j must be 1 or 2 and s must be +-1");
        }
        const int state = (s == 1 ? 0 : 2) + (j - 1);
        return field_->p(state, t, x);
    }

    // <s_j> = sum_s s pi_j(s)
    double expected(int j, int t, int x) const { return (*this)(j, 1, t, x) - (*this)(j, -1, t, x); }

private:
    const ProbField* field_;
};

// Where lattice residuals are evaluated: everywhere with periodic neighbours,
// or only on sites at least one step from every edge.
enum class EvalMode { periodic, interior };

struct ResidualSummary {
    double max_abs = 0.0;
    double field_scale = 0.0;
    double relative() const { return field_scale > 0.0 ? max_abs / field_scale : max_abs; }
};

namespace detail {

template <typename F>
void for_each_site(int nt, int nx, EvalMode mode, F&& f) {
    const int m = mode == EvalMode::interior ? 1 : 0;
    for (int t = m; t < nt - m; ++t)
        for (int x = m; x < nx - m; ++x) f(t, x);
}

}  // namespace detail

// Shift-operator equations of motion evaluated at every site (periodic
// neighbours). Components:
//   0: psi1 + (1/2mu) [psi2(t-1,x+1) - psi2(t+1,x-1)]
//   1: psi2 + (1/2mu) [psi1(t+1,x+1) - psi1(t-1,x-1)]
//   2: 1/2 [(b-a) psi4 - (a+b) psi3] - mu psi3
//   3: 1/2 [(a-b) psi3 + (a+b) psi4] - mu psi4
// with a = 1/2 (E(1,1) + E(-1,-1)), b = 1/2 (E(1,-1) + E(-1,1)).
// For psi = Gamma pbar these equal -(1/mu) (Gamma r)_{1,2} and (Gamma r)_{3,4}
// with r = (T - mu I) pbar.
inline Grid4 lattice_equations(const WaveField& w, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("lattice_equations: mu must be positive");
    const Grid4& p = w.psi;
    Grid4 out(p.nt(), p.nx());
    const double k = 1.0 / (2.0 * mu);
    for (int t = 0; t < p.nt(); ++t) {
        for (int x = 0; x < p.nx(); ++x) {
            out(0, t, x) = p(0, t, x) + k * (p.wrapped(1, t - 1, x + 1) - p.wrapped(1, t + 1, x - 1));
            out(1, t, x) = p(1, t, x) + k * (p.wrapped(0, t + 1, x + 1) - p.wrapped(0, t - 1, x - 1));
            auto a = [&](int s) { return 0.5 * (p.wrapped(s, t + 1, x + 1) + p.wrapped(s, t - 1, x - 1)); };
            auto b = [&](int s) { return 0.5 * (p.wrapped(s, t + 1, x - 1) + p.wrapped(s, t - 1, x + 1)); };
            const double a3 = a(2), a4 = a(3), b3 = b(2), b4 = b(3);
            out(2, t, x) = 0.5 * ((b4 - a4) - (a3 + b3)) - mu * p(2, t, x);
            out(3, t, x) = 0.5 * ((a3 - b3) + (a4 + b4)) - mu * p(3, t, x);
        }
    }
    return out;
}

namespace detail {

inline ResidualSummary summarize(const Grid4& eq, const WaveField& w, int first, int last, EvalMode mode) {
    ResidualSummary s;
    detail::for_each_site(eq.nt(), eq.nx(), mode, [&](int t, int x) {
        for (int c = first; c <= last; ++c) {
            s.max_abs = std::max(s.max_abs, std::abs(eq(c, t, x)));
            s.field_scale = std::max(s.field_scale, std::abs(w.psi(c, t, x)));
        }
    });
    return s;
}

}  // namespace detail

// Max |row| of the exact lattice Dirac equation for (psi1, psi2).
inline ResidualSummary exact_dirac_residual(const WaveField& w, double mu, EvalMode mode = EvalMode::periodic) {
    return detail::summarize(lattice_equations(w, mu), w, 0, 1, mode);
}

// Max |row| of the exact lattice equation for the auxiliary pair (psi3, psi4).
inline ResidualSummary auxiliary_residual(const WaveField& w, double mu, EvalMode mode = EvalMode::periodic) {
    return detail::summarize(lattice_equations(w, mu), w, 2, 3, mode);
}

// The differential Dirac equation in lattice units (hbar / mc = 1 / mu),
// derivatives by centered differences:
//   psi1 + (1/mu) (d_x - d_t) psi2,   psi2 + (1/mu) (d_x + d_t) psi1.
inline ResidualSummary continuum_dirac_residual(const WaveField& w, double mu, EvalMode mode = EvalMode::periodic) {
    if (!(mu > 0.0)) throw std::invalid_argument("continuum_dirac_residual: mu must be positive");
    const Grid4& p = w.psi;
    ResidualSummary s;
    detail::for_each_site(p.nt(), p.nx(), mode, [&](int t, int x) {
        auto dt = [&](int c) { return 0.5 * (p.wrapped(c, t + 1, x) - p.wrapped(c, t - 1, x)); };
        auto dx = [&](int c) { return 0.5 * (p.wrapped(c, t, x + 1) - p.wrapped(c, t, x - 1)); };
        const double r1 = p(0, t, x) + (dx(1) - dt(1)) / mu;
        const double r2 = p(1, t, x) + (dx(0) + dt(0)) / mu;
        s.max_abs = std::max({s.max_abs, std::abs(r1), std::abs(r2)});
        s.field_scale = std::max({s.field_scale, std::abs(p(0, t, x)), std::abs(p(1, t, x))});
    });
    return s;
}

// ---------------------------------------------------------------------------
// Charge and current
// ---------------------------------------------------------------------------

// Sign of the current. `conserving` is j = psi1^2 - psi2^2, which satisfies
// d_t rho + d_x j = 0 for solutions of m psi1 = (d_t - d_x) psi2,
// m psi2 = -(d_t + d_x) psi1. `printed` is the opposite sign, kept for the
// discrepancy report.
enum class CurrentConvention { conserving, printed };

struct CurrentField {
    int nt = 0;
    int nx = 0;
    std::vector<double> rho;
    std::vector<double> j;

    double rho_at(int t, int x) const { return rho[static_cast<std::size_t>(t) * nx + x]; }
    double j_at(int t, int x) const { return j[static_cast<std::size_t>(t) * nx + x]; }
};

inline CurrentField currents(const WaveField& w, CurrentConvention conv = CurrentConvention::conserving) {
    CurrentField c;
    c.nt = w.nt();
    c.nx = w.nx();
    const auto p1 = w.psi.plane(0);
    const auto p2 = w.psi.plane(1);
    c.rho.resize(p1.size());
    c.j.resize(p1.size());
    const double sign = conv == CurrentConvention::conserving ? 1.0 : -1.0;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        const double a = p1[i] * p1[i];
        const double b = p2[i] * p2[i];
        c.rho[i] = a + b;
        c.j[i] = sign * (a - b);
    }
    return c;
}

struct ContinuityReport {
    std::vector<double> residual;  // per site, zero outside the evaluated region
    double max_abs = 0.0;
    std::vector<double> slice_sums;  // dx * sum_x rho(t, x), one per t
    // (max - min) / mean of slice_sums
    double slice_spread() const {
        if (slice_sums.empty()) return 0.0;
        const auto [lo, hi] = std::minmax_element(slice_sums.begin(), slice_sums.end());
        double mean = 0.0;
        for (double v : slice_sums) mean += v;
        mean /= static_cast<double>(slice_sums.size());
        return mean != 0.0 ? (*hi - *lo) / std::abs(mean) : (*hi - *lo);
    }
};

// Centered-difference d_t rho + d_x j with grid spacings dt, dx.
inline ContinuityReport continuity_residual(const CurrentField& c, double dt = 1.0, double dx = 1.0,
                                            EvalMode mode = EvalMode::periodic) {
    if (!(dt > 0.0 && dx > 0.0)) throw std::invalid_argument("continuity_residual: spacings must be positive");
    ContinuityReport rep;
    rep.residual.assign(c.rho.size(), 0.0);
    auto rho = [&](std::int64_t t, std::int64_t x) { return c.rho_at(wrap_index(t, c.nt), wrap_index(x, c.nx)); };
    auto cur = [&](std::int64_t t, std::int64_t x) { return c.j_at(wrap_index(t, c.nt), wrap_index(x, c.nx)); };
    detail::for_each_site(c.nt, c.nx, mode, [&](int t, int x) {
        const double r = (rho(t + 1, x) - rho(t - 1, x)) / (2.0 * dt) + (cur(t, x + 1) - cur(t, x - 1)) / (2.0 * dx);
        rep.residual[static_cast<std::size_t>(t) * c.nx + x] = r;
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
    });
    rep.slice_sums.resize(static_cast<std::size_t>(c.nt));
    for (int t = 0; t < c.nt; ++t) {
        detail::CompensatedSum s;
        for (int x = 0; x < c.nx; ++x) s.add(c.rho_at(t, x));
        rep.slice_sums[static_cast<std::size_t>(t)] = dx * s.value();
    }
    return rep;
}

}  // namespace diracwalk
