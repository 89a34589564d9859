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
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diracwalk/matrixkit.hpp"

namespace diracwalk {

// Label (a, b) of the shift operator E_{a,b} f(t, x) = f(t + a, x + b).
// A walker carried by the hop matrix T^(a,b) is displaced by (-a, -b).
struct HopLabel {
    int a = 0;  // time shift
    int b = 0;  // space shift

    friend bool operator==(const HopLabel&, const HopLabel&) = default;

    static HopLabel checked(int a, int b) {
        const bool internal = (a == 0 && b == 0);
        const bool light_cone = (a == 1 || a == -1) && (b == 1 || b == -1);
        if (!internal && !light_cone) {
            throw std::invalid_argument("HopLabel: only (0,0) and light-cone hops (+-1,+-1) are allowed");
        }
        return HopLabel{a, b};
    }
};

// Storage order of the four light-cone hop matrices.
inline constexpr std::array<HopLabel, 4> kLightConeHops{
    HopLabel{1, 1}, HopLabel{-1, 1}, HopLabel{1, -1}, HopLabel{-1, -1}};

inline std::size_t hop_index(HopLabel h) {
    for (std::size_t i = 0; i < kLightConeHops.size(); ++i) {
        if (kLightConeHops[i] == h) return i;
    }
    throw std::invalid_argument("hop_index: not a light-cone hop");
}

inline std::string to_string(HopLabel h) {
    return "(" + std::to_string(h.a) + "," + std::to_string(h.b) + ")";
}

template <typename T>
struct BasicTransitionSet {
    SquareMatrix<T, 4> t00;
    std::array<SquareMatrix<T, 4>, 4> hops;  // ordered as kLightConeHops
    double epsilon = 0.0;

    const SquareMatrix<T, 4>& hop(HopLabel h) const { return hops[hop_index(h)]; }
    SquareMatrix<T, 4>& hop(HopLabel h) { return hops[hop_index(h)]; }

    // T00 plus all hop matrices, i.e. the operator with every shift set to 1.
    SquareMatrix<T, 4> total() const {
        SquareMatrix<T, 4> s = t00;
        for (const auto& m : hops) s += m;
        return s;
    }

    friend bool operator==(const BasicTransitionSet&, const BasicTransitionSet&) = default;
};

using ExactTransitionSet = BasicTransitionSet<Rational>;
using TransitionSet = BasicTransitionSet<double>;

template <typename T>
TransitionSet to_floating(const BasicTransitionSet<T>& ts) {
    TransitionSet out;
    out.t00 = ts.t00.template cast<double>();
    for (std::size_t i = 0; i < 4; ++i) out.hops[i] = ts.hops[i].template cast<double>();
    out.epsilon = ts.epsilon;
    return out;
}

namespace detail {

inline Mat4 unit_entries(std::initializer_list<std::pair<int, int>> one_based) {
    Mat4 m;
    for (const auto& [r, c] : one_based) m(r - 1, c - 1) = half();
    return m;
}

}  // namespace detail

// The sparse solution with no internal transitions. Entries are 1/2 at the
// listed (row, column) positions (1-based).
inline ExactTransitionSet canonical_transitions() {
    ExactTransitionSet ts;
    ts.hop({1, -1}) = detail::unit_entries({{1, 2}, {3, 4}});
    ts.hop({-1, 1}) = detail::unit_entries({{1, 4}, {3, 2}});
    ts.hop({1, 1}) = detail::unit_entries({{2, 3}, {4, 1}});
    ts.hop({-1, -1}) = detail::unit_entries({{2, 1}, {4, 3}});
    return ts;
}

// Drift combinations of the hop matrices.
template <typename T>
struct ScatteringMatrices {
    SquareMatrix<T, 4> sum;         // T(1,1) + T(-1,1) + T(1,-1) + T(-1,-1)
    SquareMatrix<T, 4> time_drift;  // T(1,1) - T(-1,1) + T(1,-1) - T(-1,-1)
    SquareMatrix<T, 4> space_drift; // T(1,1) + T(-1,1) - T(1,-1) - T(-1,-1)
    SquareMatrix<T, 4> mixed;       // T(1,1) - T(-1,1) - T(1,-1) + T(-1,-1)
};

template <typename T>
ScatteringMatrices<T> scattering_matrices(const BasicTransitionSet<T>& ts) {
    const auto& pp = ts.hop({1, 1});
    const auto& mp = ts.hop({-1, 1});
    const auto& pm = ts.hop({1, -1});
    const auto& mm = ts.hop({-1, -1});
    return {pp + mp + pm + mm, pp - mp + pm - mm, pp + mp - pm - mm, pp - mp - pm + mm};
}

// Right-hand sides of the drift constraints, -(kappa mu / 2) H (x) sigma.
inline Mat4 time_drift_target(const Rational& kappa_mu) {
    return (-kappa_mu / 2) * kron(h_matrix(), sigma_t());
}
inline Mat4 space_drift_target(const Rational& kappa_mu) {
    return (-kappa_mu / 2) * kron(h_matrix(), sigma_x());
}

// Structural checks on a transition set (tolerance applies to doubles only).
struct TransitionChecks {
    double unit_interval_violation = 0.0;  // max distance of an entry outside [0,1]
    double support_overlap = 0.0;          // max |T^(p)_{jk} T^(q)_{jk}| over p != q
    double column_sum_error = 0.0;         // max |1 - column sum of the total operator|
};

template <typename T>
TransitionChecks check_transition_set(const BasicTransitionSet<T>& ts) {
    TransitionChecks out;
    auto visit_entries = [&](const SquareMatrix<T, 4>& m) {
        for (const auto& e : m.entries()) {
            const double v = scalar_cast<double>(e);
            if (v < 0.0) out.unit_interval_violation = std::max(out.unit_interval_violation, -v);
            if (v > 1.0) out.unit_interval_violation = std::max(out.unit_interval_violation, v - 1.0);
        }
    };
    visit_entries(ts.t00);
    for (const auto& m : ts.hops) visit_entries(m);

    std::vector<const SquareMatrix<T, 4>*> all{&ts.t00};
    for (const auto& m : ts.hops) all.push_back(&m);
    for (std::size_t p = 0; p < all.size(); ++p) {
        for (std::size_t q = p + 1; q < all.size(); ++q) {
            for (std::size_t k = 0; k < 16; ++k) {
                const double prod =
                    scalar_cast<double>(all[p]->entries()[k]) * scalar_cast<double>(all[q]->entries()[k]);
                out.support_overlap = std::max(out.support_overlap, std::abs(prod));
            }
        }
    }

    for (const auto& s : ts.total().column_sums()) {
        out.column_sum_error = std::max(out.column_sum_error, std::abs(1.0 - scalar_cast<double>(s)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Derivation from the constraint system
// ---------------------------------------------------------------------------

struct DerivationResult {
    bool feasible = false;
    std::optional<ExactTransitionSet> solution;
    // Solutions found by exhaustive enumeration of per-entry carriers.
    std::size_t solution_count = 0;
    // Number of carrier assignments examined.
    std::size_t assignments_checked = 0;
    // The split into positive and negative parts, before any feasibility test.
    ExactTransitionSet sign_split;
    std::string reason;

    bool unique() const { return feasible && solution_count == 1; }
};

// Solves the drift constraints
//   (A - D) = 1/2 (P + Q),   (C - B) = 1/2 (P - Q)
// with P = -(kappa mu/2) H (x) sigma_t, Q = -(kappa mu/2) H (x) sigma_x and
// A..D = T(1,1), T(-1,1), T(1,-1), T(-1,-1), T(0,0) = 0, under entries in
// [0,1], disjoint support and column-stochasticity.
//
// Under disjoint support each matrix entry is carried by at most one hop,
// and the constraints decouple per entry. Every carrier choice of every
// entry is enumerated; the column-sum condition couples entries and is
// checked on each full assignment.
inline DerivationResult derive_transitions(const Rational& kappa_mu = Rational(1)) {
    DerivationResult out;
    const Mat4 p = time_drift_target(kappa_mu);
    const Mat4 q = space_drift_target(kappa_mu);
    const Mat4 x = half() * (p + q);  // A - D
    const Mat4 y = half() * (p - q);  // C - B

    const std::size_t ia = hop_index({1, 1});
    const std::size_t ib = hop_index({-1, 1});
    const std::size_t ic = hop_index({1, -1});
    const std::size_t id = hop_index({-1, -1});

    const Rational zero(0);
    for (std::size_t k = 0; k < 16; ++k) {
        const Rational xv = x.entries()[k];
        const Rational yv = y.entries()[k];
        const std::size_t r = k / 4;
        const std::size_t c = k % 4;
        out.sign_split.hops[ia](r, c) = xv > zero ? xv : zero;
        out.sign_split.hops[id](r, c) = xv < zero ? -xv : zero;
        out.sign_split.hops[ic](r, c) = yv > zero ? yv : zero;
        out.sign_split.hops[ib](r, c) = yv < zero ? -yv : zero;
    }

    // Carrier options per entry: (hop index or -1 for none, value).
    struct Option {
        int carrier;
        Rational value;
    };
    std::array<std::vector<Option>, 16> options;
    for (std::size_t k = 0; k < 16; ++k) {
        const Rational xv = x.entries()[k];
        const Rational yv = y.entries()[k];
        auto consider = [&](int carrier, Rational v) {
            // A carried entry must be a nonzero probability.
            if (v > zero && v <= Rational(1)) options[k].push_back({carrier, v});
        };
        if (xv == zero && yv == zero) options[k].push_back({-1, zero});
        if (yv == zero) {
            consider(static_cast<int>(ia), xv);
            consider(static_cast<int>(id), -xv);
        }
        if (xv == zero) {
            consider(static_cast<int>(ic), yv);
            consider(static_cast<int>(ib), -yv);
        }
        if (options[k].empty()) {
            out.reason = "entry (" + std::to_string(k / 4 + 1) + "," + std::to_string(k % 4 + 1) +
                         ") admits no nonnegative carrier in [0,1] under disjoint support";
            return out;
        }
    }

    constexpr std::size_t kMaxAssignments = std::size_t{1} << 24;
    std::size_t combos = 1;
    for (const auto& o : options) {
        combos *= o.size();
        if (combos > kMaxAssignments) {
            out.reason = "carrier enumeration exceeds the supported size";
            return out;
        }
    }

    std::array<std::size_t, 16> pick{};
    for (std::size_t n = 0; n < combos; ++n) {
        std::size_t rem = n;
        for (std::size_t k = 0; k < 16; ++k) {
            pick[k] = rem % options[k].size();
            rem /= options[k].size();
        }
        ExactTransitionSet cand;
        for (std::size_t k = 0; k < 16; ++k) {
            const Option& o = options[k][pick[k]];
            if (o.carrier >= 0) cand.hops[static_cast<std::size_t>(o.carrier)](k / 4, k % 4) = o.value;
        }
        ++out.assignments_checked;
        bool stochastic = true;
        for (const auto& s : cand.total().column_sums()) stochastic = stochastic && (s == Rational(1));
        if (!stochastic) continue;
        ++out.solution_count;
        if (!out.solution) out.solution = cand;
    }

    out.feasible = out.solution_count > 0;
    if (!out.feasible) {
        out.reason = "no assignment is column-stochastic (requires kappa*mu = 1)";
    } else if (out.solution_count > 1) {
        out.reason = "multiple solutions";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraint report
// ---------------------------------------------------------------------------

struct NamedResidual {
    std::string name;
    std::string description;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed() const { return std::isfinite(value) && value >= 0.0 && value <= tolerance; }
};

// A printed relation the transition set does not reproduce. Reported, never thrown.
struct Discrepancy {
    std::string name;
    std::string description;
    Mat4d actual;
    Mat4d printed;
    Mat4d deviation;  // actual - printed
    double max_abs = 0.0;
};

struct ConstraintReport {
    Mat4d s_sigma;
    Mat4d s_t;
    Mat4d s_x;
    Mat2d r_m;
    Mat2d r_m_tilde;
    Mat2d r_tt;
    Mat2d r_tt_tilde;
    Mat2d r_t_tilde;
    Mat2d r_x_tilde;
    double c1 = 0.0;
    double c2 = 0.0;
    double kappa_mu = 1.0;
    double mu = 0.0;
    std::vector<NamedResidual> residuals;
    std::vector<Discrepancy> discrepancies;

    const NamedResidual& residual(const std::string& name) const {
        for (const auto& r : residuals)
            if (r.name == name) return r;
        throw std::out_of_range("ConstraintReport: no residual named " + name);
    }
    bool all_passed() const {
        for (const auto& r : residuals)
            if (!r.passed()) return false;
        return true;
    }
};

// Evaluates every constraint identity on `ts`. Residuals are computed in the
// scalar type of `ts` (exactly, for the canonical rational set) and reported
// as doubles. `mu` enters only through the mass block.
template <typename T>
ConstraintReport constraint_report(const BasicTransitionSet<T>& ts, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("constraint_report: mu must be in (0,1)");
    ConstraintReport rep;
    rep.mu = mu;
    rep.kappa_mu = 1.0;
    const double exact_tol = std::is_same_v<T, Rational> ? 0.0 : 1e-15;

    const auto sc = scattering_matrices(ts);
    const SquareMatrix<T, 4> total = ts.t00 + sc.sum;
    rep.s_sigma = sc.sum.template cast<double>();
    rep.s_t = sc.time_drift.template cast<double>();
    rep.s_x = sc.space_drift.template cast<double>();

    auto add = [&](std::string name, std::string desc, double value, double tol) {
        rep.residuals.push_back({std::move(name), std::move(desc), value, tol});
    };

    const TransitionChecks checks = check_transition_set(ts);
    add("unit_interval_entries", "every hop entry is a probability", checks.unit_interval_violation, exact_tol);
    add("disjoint_support", "no entry is nonzero in two transition matrices", checks.support_overlap, exact_tol);
    add("column_stochastic", "each source state's outgoing probabilities sum to one", checks.column_sum_error,
        std::max(exact_tol, 1e-15));

    const Rational km(1);
    add("time_drift_constraint", "T(1,1)-T(-1,1)+T(1,-1)-T(-1,-1) = -(kappa mu/2) H (x) sigma_t",
        max_abs_diff(sc.time_drift, time_drift_target(km)), exact_tol);
    add("space_drift_constraint", "T(1,1)+T(-1,1)-T(1,-1)-T(-1,-1) = -(kappa mu/2) H (x) sigma_x",
        max_abs_diff(sc.space_drift, space_drift_target(km)), exact_tol);

    double trace_max = 0.0;
    for (const auto& m : ts.hops) trace_max = std::max(trace_max, magnitude(m.trace()));
    add("traceless_hops", "every hop matrix is traceless", trace_max, exact_tol);

    // Coefficients of the total operator written as 1/2 J (x) [[c1, 1-c2], [1-c1, c2]].
    const T two(2);
    const T c1 = two * total(0, 0);
    const T c2 = two * total(1, 1);
    rep.c1 = scalar_cast<double>(c1);
    rep.c2 = scalar_cast<double>(c2);
    add("no_self_loops", "c1 = c2 = 0", std::max(std::abs(rep.c1), std::abs(rep.c2)), exact_tol);

    SquareMatrix<T, 2> coeff;
    coeff(0, 0) = c1;
    coeff(0, 1) = T(1) - c2;
    coeff(1, 0) = T(1) - c1;
    coeff(1, 1) = c2;
    const T h = scalar_cast<T>(half());
    add("hop_sum_block_form", "T00 + S_sigma = 1/2 J (x) [[c1, 1-c2], [1-c1, c2]] with J = I + sigma_x",
        max_abs_diff(total, h * kron(j_matrix().cast<T>(), coeff)), exact_tol);

    // Mass block, from the coefficients: Rt^(m) = (1/mu) [[mu-c1, c2-1], [c1-1, mu-c2]].
    Mat2d rmt;
    rmt(0, 0) = (mu - rep.c1) / mu;
    rmt(0, 1) = (rep.c2 - 1.0) / mu;
    rmt(1, 0) = (rep.c1 - 1.0) / mu;
    rmt(1, 1) = (mu - rep.c2) / mu;
    rep.r_m_tilde = rmt;
    rep.r_m = untilde(rmt);
    const Mat2d rmt_closed{{1.0, -1.0 / mu}, {-1.0 / mu, 1.0}};
    const Mat2d rm_closed{{1.0 + 1.0 / mu, 0.0}, {0.0, 1.0 - 1.0 / mu}};
    add("mass_block_tilde", "Rt^(m) = [[1, -1/mu], [-1/mu, 1]]", max_abs_diff(rmt, rmt_closed), 1e-12);
    add("mass_block", "R^(m) = diag(1 + 1/mu, 1 - 1/mu)", max_abs_diff(rep.r_m, rm_closed), 1e-12);
    double colsum_err = 0.0;
    for (double s : rmt.column_sums()) colsum_err = std::max(colsum_err, std::abs(s - (mu - 1.0) / mu));
    add("mass_block_normalization", "1 . Rt^(m) = (mu - 1)/mu", colsum_err, 1e-12);

    // Drift-free auxiliary blocks: Rt^(t) = -(S_t block(0,0) + block(0,1)) / (kappa mu).
    const Mat2d st00 = block(rep.s_t, 0, 0), st01 = block(rep.s_t, 0, 1);
    const Mat2d sx00 = block(rep.s_x, 0, 0), sx01 = block(rep.s_x, 0, 1);
    rep.r_t_tilde = -1.0 * (st00 + st01);
    rep.r_x_tilde = -1.0 * (sx00 + sx01);
    add("drift_free_auxiliary", "Rt^(t) = Rt^(x) = 0",
        std::max(rep.r_t_tilde.max_abs(), rep.r_x_tilde.max_abs()), std::max(exact_tol, 1e-15));

    // Diffusion block: S_sigma = -kappa mu J (x) Rt^(tt).
    const Mat2d s00 = block(rep.s_sigma, 0, 0);
    rep.r_tt_tilde = -1.0 * s00;
    rep.r_tt = untilde(rep.r_tt_tilde);
    double block_spread = 0.0;
    for (std::size_t bi = 0; bi < 2; ++bi)
        for (std::size_t bj = 0; bj < 2; ++bj)
            block_spread = std::max(block_spread, max_abs_diff(block(rep.s_sigma, bi, bj), s00));
    add("diffusion_block_uniform", "S_sigma has four equal 2x2 blocks", block_spread, exact_tol);
    const Mat2d rtt_closed = -0.5 * sigma_x().cast<double>();
    add("diffusion_block_tilde", "Rt^(tt) = -sigma_x / (2 kappa mu)", max_abs_diff(rep.r_tt_tilde, rtt_closed),
        1e-15);
    add("diffusion_block", "R^(tt) = sigma_z / 2", max_abs_diff(rep.r_tt, 0.5 * sigma_z().cast<double>()), 1e-15);

    // The printed hop sum uses I in place of J.
    Discrepancy d;
    d.name = "hop_sum_printed_form";
    d.description =
        "printed hop-matrix sum 1/2 I (x) sigma_x; the unique sparse solution sums to 1/2 (I + sigma_x) (x) sigma_x. "
        "The printed form follows from writing the similarity transform with I (x) G^-1 R G where J (x) G^-1 R G "
        "is required.";
    d.actual = rep.s_sigma;
    d.printed = (half() * kron(identity2(), sigma_x())).cast<double>();
    d.deviation = d.actual - d.printed;
    d.max_abs = d.deviation.max_abs();
    rep.discrepancies.push_back(d);
    return rep;
}

// Reweights the two outgoing branches of every source state: the branch
// whose walker displacement increases t (shift label a = -1) gets (1+eps)/2,
// the other (1-eps)/2.
template <typename T>
TransitionSet apply_bias(const BasicTransitionSet<T>& ts, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("apply_bias: epsilon must lie in [0, 1)");
    }
    if (ts.epsilon != 0.0) throw std::invalid_argument("apply_bias: input set is already biased");
    TransitionSet out = to_floating(ts);
    if (epsilon == 0.0) return out;

    // Each column must split as 1/2 forward + 1/2 backward for the rule to
    // preserve column sums.
    for (std::size_t c = 0; c < 4; ++c) {
        double fwd = 0.0, bwd = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t r = 0; r < 4; ++r) {
                (kLightConeHops[i].a < 0 ? fwd : bwd) += out.hops[i](r, c);
            }
        }
        if (std::abs(fwd - 0.5) > 1e-15 || std::abs(bwd - 0.5) > 1e-15 || out.t00.max_abs() != 0.0) {
            throw std::invalid_argument("apply_bias: source state " + std::to_string(c + 1) +
                                        " does not split evenly between forward and backward hops");
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        out.hops[i] *= (kLightConeHops[i].a < 0 ? 1.0 + epsilon : 1.0 - epsilon);
    }
    out.epsilon = epsilon;
    return out;
}

}  // namespace diracwalk
