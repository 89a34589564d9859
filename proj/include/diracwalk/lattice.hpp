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
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diracwalk/detail/summation.hpp"
#include "diracwalk/transitions.hpp"

namespace diracwalk {

// Thrown when a requested run would not fit the configured memory budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Periodic space-time lattice in internal units (dt = dx = 1, hbar = c = 1,
// particle mass = mu).
struct LatticeSpec {
    int nt = 256;
    int nx = 256;
    double mu = 0.1;

    void validate() const {
        if (nt < 4 || nx < 4 || nt % 2 != 0 || nx % 2 != 0) {
            throw std::invalid_argument("LatticeSpec: nt and nx must be even and >= 4 (got " + std::to_string(nt) +
                                        "x" + std::to_string(nx) + ")");
        }
        if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("LatticeSpec: mu must lie in (0, 1)");
    }

    // An evolution of `lambda_max + 1` steps from a single site never wraps
    // when both extents exceed 2 (lambda_max + 1).
    bool wrap_free_for(std::int64_t lambda_max) const {
        return nt > 2 * (lambda_max + 1) && nx > 2 * (lambda_max + 1);
    }

    void require_wrap_free(std::int64_t lambda_max) const {
        if (!wrap_free_for(lambda_max)) {
            throw std::invalid_argument("LatticeSpec: wrap-free evolution to lambda = " + std::to_string(lambda_max) +
                                        " needs nt, nx > " + std::to_string(2 * (lambda_max + 1)));
        }
    }
};

inline int wrap_index(std::int64_t i, int n) {
    const std::int64_t r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// Dense [4][nt][nx] grid of doubles. Component index is 0-based.
class Grid4 {
public:
    Grid4() = default;
    Grid4(int nt, int nx) : nt_(nt), nx_(nx), values_(std::size_t{4} * nt * nx, 0.0) {
        if (nt <= 0 || nx <= 0) throw std::invalid_argument("Grid4: extents must be positive");
    }

    int nt() const { return nt_; }
    int nx() const { return nx_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(nt_) * nx_; }

    double& operator()(int s, int t, int x) { return values_[index(s, t, x)]; }
    double operator()(int s, int t, int x) const { return values_[index(s, t, x)]; }

    // Periodic access; t and x may be any integers.
    double wrapped(int s, std::int64_t t, std::int64_t x) const {
        return values_[index(s, wrap_index(t, nt_), wrap_index(x, nx_))];
    }
    double& wrapped(int s, std::int64_t t, std::int64_t x) {
        return values_[index(s, wrap_index(t, nt_), wrap_index(x, nx_))];
    }

    std::span<double> plane(int s) { return {values_.data() + static_cast<std::size_t>(s) * plane_size(), plane_size()}; }
    std::span<const double> plane(int s) const {
        return {values_.data() + static_cast<std::size_t>(s) * plane_size(), plane_size()};
    }
    std::span<double> row(int s, int t) {
        return {values_.data() + index(s, t, 0), static_cast<std::size_t>(nx_)};
    }
    std::span<const double> row(int s, int t) const {
        return {values_.data() + index(s, t, 0), static_cast<std::size_t>(nx_)};
    }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool same_shape(const Grid4& o) const { return nt_ == o.nt_ && nx_ == o.nx_; }

    friend bool operator==(const Grid4&, const Grid4&) = default;

private:
    std::size_t index(int s, int t, int x) const {
        return (static_cast<std::size_t>(s) * nt_ + static_cast<std::size_t>(t)) * nx_ + static_cast<std::size_t>(x);
    }

    int nt_ = 0;
    int nx_ = 0;
    std::vector<double> values_;
};

inline double max_abs_diff(const Grid4& a, const Grid4& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: grid shapes differ");
    double m = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
    return m;
}

// Occupation probabilities p_i(t, x | lambda) at one ordinal instant.
struct ProbField {
    Grid4 p;
    std::int64_t lambda = 0;

    ProbField() = default;
    ProbField(int nt, int nx, std::int64_t lambda_ = 0) : p(nt, nx), lambda(lambda_) {}

    int nt() const { return p.nt(); }
    int nx() const { return p.nx(); }

    double total_mass() const { return detail::compensated_sum(p.values()); }
    double min_value() const {
        const auto v = p.values();
        return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    }

    friend bool operator==(const ProbField&, const ProbField&) = default;
};

// ---------------------------------------------------------------------------
// Initial conditions
// ---------------------------------------------------------------------------

// Unit mass at one site in one state (state is 1-based).
inline ProbField init_delta(const LatticeSpec& spec, int t0, int x0, int state) {
    spec.validate();
    if (t0 < 0 || t0 >= spec.nt || x0 < 0 || x0 >= spec.nx) {
        throw std::out_of_range("init_delta: site (" + std::to_string(t0) + "," + std::to_string(x0) +
                                ") outside the lattice");
    }
    if (state < 1 || state > 4) throw std::out_of_range("init_delta: state must be 1..4");
    ProbField f(spec.nt, spec.nx);
    f.p(state - 1, t0, x0) = 1.0;
    return f;
}

// Normalized Gaussian-weighted mass around (t0, x0), distributed over states
// by `mix` (nonnegative, summing to 1). Distances use the periodic minimum image.
inline ProbField init_packet(const LatticeSpec& spec, double t0, double x0, double width,
                             const std::array<double, 4>& mix) {
    spec.validate();
    if (!(width > 0.0)) throw std::invalid_argument("init_packet: width must be positive");
    if (!(t0 >= 0.0 && t0 < spec.nt && x0 >= 0.0 && x0 < spec.nx)) {
        throw std::out_of_range("init_packet: center outside the lattice");
    }
    double mix_sum = 0.0;
    for (double m : mix) {
        if (!(m >= 0.0)) throw std::invalid_argument("init_packet: state mix must be nonnegative");
        mix_sum += m;
    }
    if (std::abs(mix_sum - 1.0) > 1e-12) throw std::invalid_argument("init_packet: state mix must sum to 1");

    auto min_image = [](double d, int n) {
        d = std::fmod(d, static_cast<double>(n));
        if (d > 0.5 * n) d -= n;
        if (d < -0.5 * n) d += n;
        return d;
    };
    std::vector<double> weight(static_cast<std::size_t>(spec.nt) * spec.nx);
    detail::CompensatedSum total;
    for (int t = 0; t < spec.nt; ++t) {
        for (int x = 0; x < spec.nx; ++x) {
            const double dt = min_image(t - t0, spec.nt);
            const double dx = min_image(x - x0, spec.nx);
            const double w = std::exp(-(dt * dt + dx * dx) / (2.0 * width * width));
            weight[static_cast<std::size_t>(t) * spec.nx + x] = w;
            total.add(w);
        }
    }
    const double norm = total.value();
    ProbField f(spec.nt, spec.nx);
    for (int s = 0; s < 4; ++s) {
        auto plane = f.p.plane(s);
        for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = mix[s] * weight[i] / norm;
    }
    return f;
}

// Uniform random nonnegative field with unit mass.
inline ProbField init_random(const LatticeSpec& spec, std::uint64_t seed) {
    spec.validate();
    ProbField f(spec.nt, spec.nx);
    std::mt19937_64 gen(seed);
    for (double& v : f.p.values()) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double m = f.total_mass();
    for (double& v : f.p.values()) v /= m;
    return f;
}

// ---------------------------------------------------------------------------
// Master-equation stepper
// ---------------------------------------------------------------------------

// Nonzero entries of a transition set in a fixed evaluation order.
class StepPlan {
public:
    struct Term {
        int source_state;  // 0-based column
        int dt;            // shift label: reads source at (t + dt, x + dx)
        int dx;
        double weight;
    };

    explicit StepPlan(const TransitionSet& ts) {
        auto collect = [&](const Mat4d& m, int a, int b) {
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    if (m(r, c) != 0.0) rows_[r].push_back({c, a, b, m(r, c)});
        };
        collect(ts.t00, 0, 0);
        for (std::size_t i = 0; i < 4; ++i) collect(ts.hops[i], kLightConeHops[i].a, kLightConeHops[i].b);
    }

    const std::vector<Term>& terms(int target_state) const { return rows_[target_state]; }

private:
    std::array<std::vector<Term>, 4> rows_;
};

// dst = T src with periodic wrap. Each destination value is accumulated in
// the plan's fixed term order, so the result does not depend on how rows are
// scheduled.
inline void step_into(const Grid4& src, Grid4& dst, const StepPlan& plan) {
    if (!src.same_shape(dst)) throw std::invalid_argument("step_into: shape mismatch");
    if (&src == &dst) throw std::invalid_argument("step_into: source and destination must not alias");
    const int nt = src.nt();
    const int nx = src.nx();
    for (int s = 0; s < 4; ++s) {
        const auto& terms = plan.terms(s);
        for (int t = 0; t < nt; ++t) {
            auto out = dst.row(s, t);
            std::fill(out.begin(), out.end(), 0.0);
            for (const auto& term : terms) {
                const auto in = src.row(term.source_state, wrap_index(t + term.dt, nt));
                const int shift = wrap_index(term.dx, nx);
                // out[x] += w * in[(x + shift) mod nx], split into two contiguous runs.
                const int split = nx - shift;
                for (int x = 0; x < split; ++x) out[x] += term.weight * in[x + shift];
                for (int x = split; x < nx; ++x) out[x] += term.weight * in[x - split];
            }
        }
    }
}

inline ProbField step(const ProbField& field, const TransitionSet& ts) {
    ProbField out(field.nt(), field.nx(), field.lambda + 1);
    step_into(field.p, out.p, StepPlan(ts));
    return out;
}

// ---------------------------------------------------------------------------
// Ordinal prior and averaging
// ---------------------------------------------------------------------------

// Exponential weights w(lambda) = (1-mu) mu^(Lambda-lambda) / (1 - mu^(Lambda+1)),
// lambda = 0..Lambda. The step function in the prior is taken as 1 at zero,
// so both endpoints carry weight.
class OrdinalPrior {
public:
    OrdinalPrior(double mu, std::int64_t horizon) : mu_(mu), horizon_(horizon) {
        if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("OrdinalPrior: mu must lie in (0, 1)");
        if (horizon < 0) throw std::invalid_argument("OrdinalPrior: horizon must be >= 0");
        // 1 - mu^(Lambda+1) without cancellation for mu near 1.
        const double denom = -std::expm1(static_cast<double>(horizon + 1) * std::log(mu));
        normalization_ = (1.0 - mu) / denom;
        weights_.resize(static_cast<std::size_t>(horizon) + 1);
        for (std::int64_t l = 0; l <= horizon; ++l) {
            weights_[static_cast<std::size_t>(l)] = normalization_ * std::pow(mu, static_cast<double>(horizon - l));
        }
    }

    double mu() const { return mu_; }
    std::int64_t horizon() const { return horizon_; }
    // (1 - mu) / (1 - mu^(Lambda+1))
    double normalization() const { return normalization_; }
    double weight(std::int64_t lambda) const { return weights_.at(static_cast<std::size_t>(lambda)); }
    std::span<const double> weights() const { return weights_; }
    // mu^(Lambda+1)
    double tail_factor() const { return std::pow(mu_, static_cast<double>(horizon_ + 1)); }

private:
    double mu_;
    std::int64_t horizon_;
    double normalization_ = 0.0;
    std::vector<double> weights_;
};

// pbar = sum_lambda w(lambda) p(lambda).
inline ProbField ordinal_average(std::span<const ProbField> history, const OrdinalPrior& prior) {
    if (history.size() != prior.weights().size()) {
        throw std::invalid_argument("ordinal_average: history length " + std::to_string(history.size()) +
                                    " does not match prior horizon + 1 = " + std::to_string(prior.weights().size()));
    }
    ProbField out(history.front().nt(), history.front().nx(), -1);
    auto acc = out.p.values();
    for (std::size_t l = 0; l < history.size(); ++l) {
        if (!history[l].p.same_shape(out.p)) throw std::invalid_argument("ordinal_average: shape mismatch");
        const double w = prior.weight(static_cast<std::int64_t>(l));
        const auto src = history[l].p.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
    }
    return out;
}

// Repeated stepping, keeping every field p(0..Lambda).
inline std::vector<ProbField> evolve_history(const ProbField& field0, const TransitionSet& ts, std::int64_t horizon,
                                             std::size_t max_bytes = std::size_t{1} << 30) {
    if (horizon < 0) throw std::invalid_argument("evolve_history: horizon must be >= 0");
    const double bytes = static_cast<double>(horizon + 1) * static_cast<double>(field0.p.values().size()) * sizeof(double);
    if (bytes > static_cast<double>(max_bytes)) {
        throw CapacityError("evolve_history: " + std::to_string(horizon + 1) + " fields of " +
                            std::to_string(field0.nt()) + "x" + std::to_string(field0.nx()) +
                            " exceed the history budget of " + std::to_string(max_bytes) +
                            " bytes; use the streaming average instead");
    }
    const StepPlan plan(ts);
    std::vector<ProbField> history;
    history.reserve(static_cast<std::size_t>(horizon) + 1);
    history.push_back(field0);
    for (std::int64_t l = 0; l < horizon; ++l) {
        ProbField next(field0.nt(), field0.nx(), history.back().lambda + 1);
        step_into(history.back().p, next.p, plan);
        history.push_back(std::move(next));
    }
    return history;
}

// Result of a constant-memory run: what the telescoping identity needs.
struct OrdinalRun {
    ProbField initial;               // p(0)
    ProbField average;               // pbar over lambda = 0..Lambda
    ProbField beyond;                // p(Lambda + 1)
    std::vector<double> mass;        // total mass at lambda = 0..Lambda+1
};

// Streaming fold: accumulates w(lambda) p(lambda) while stepping, then takes
// one extra step to p(Lambda + 1).
inline OrdinalRun evolve_averaged(const ProbField& field0, const TransitionSet& ts, const OrdinalPrior& prior) {
    const StepPlan plan(ts);
    OrdinalRun run;
    run.initial = field0;
    run.average = ProbField(field0.nt(), field0.nx(), -1);
    ProbField cur = field0;
    ProbField next(field0.nt(), field0.nx());
    auto acc = run.average.p.values();
    for (std::int64_t l = 0; l <= prior.horizon(); ++l) {
        run.mass.push_back(cur.total_mass());
        const double w = prior.weight(l);
        const auto src = cur.p.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
        step_into(cur.p, next.p, plan);
        next.lambda = cur.lambda + 1;
        std::swap(cur, next);
    }
    run.mass.push_back(cur.total_mass());
    run.beyond = std::move(cur);
    return run;
}

// ---------------------------------------------------------------------------
// Ordinal-time relations
// ---------------------------------------------------------------------------

// max |T pbar - mu pbar - N (p(Lambda+1) - mu^(Lambda+1) p(0))|, which
// vanishes identically when pbar is the prior average of the same run.
inline double telescoping_residual(const ProbField& pbar, const ProbField& p0, const ProbField& p_end,
                                   const TransitionSet& ts, const OrdinalPrior& prior) {
    const ProbField tp = step(pbar, ts);
    const double mu = prior.mu();
    const double n = prior.normalization();
    const double tail = prior.tail_factor();
    const auto a = tp.p.values();
    const auto b = pbar.p.values();
    const auto e = p_end.p.values();
    const auto z = p0.p.values();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - mu * b[i] - n * (e[i] - tail * z[i])));
    }
    return m;
}

// Half-open window [t_begin, t_end) x [x_begin, x_end).
struct RegionOfInterest {
    int t_begin = 0;
    int t_end = 0;
    int x_begin = 0;
    int x_end = 0;

    void validate(int nt, int nx) const {
        if (t_begin < 0 || x_begin < 0 || t_end > nt || x_end > nx || t_begin >= t_end || x_begin >= x_end) {
            throw std::out_of_range("RegionOfInterest: window outside the lattice or empty");
        }
    }
    static RegionOfInterest whole(int nt, int nx) { return {0, nt, 0, nx}; }
};

struct EigenRelationReport {
    double residual = 0.0;     // sup_roi |(T - mu I) pbar|
    double end_term = 0.0;     // N sup_roi |p(Lambda+1)|
    double telescoped = 0.0;   // N sup_roi |p(Lambda+1) - mu^(Lambda+1) p(0)|
    double roi_end_mass = 0.0; // mass of p(Lambda+1) inside the window
};

inline EigenRelationReport eigen_relation_residual(const ProbField& pbar, const ProbField& p0, const ProbField& p_end,
                                                   const TransitionSet& ts, const OrdinalPrior& prior,
                                                   const RegionOfInterest& roi) {
    roi.validate(pbar.nt(), pbar.nx());
    const ProbField tp = step(pbar, ts);
    const double mu = prior.mu();
    const double n = prior.normalization();
    const double tail = prior.tail_factor();
    EigenRelationReport rep;
    detail::CompensatedSum mass;
    for (int s = 0; s < 4; ++s) {
        for (int t = roi.t_begin; t < roi.t_end; ++t) {
            for (int x = roi.x_begin; x < roi.x_end; ++x) {
                const double r = tp.p(s, t, x) - mu * pbar.p(s, t, x);
                rep.residual = std::max(rep.residual, std::abs(r));
                rep.end_term = std::max(rep.end_term, n * std::abs(p_end.p(s, t, x)));
                rep.telescoped = std::max(rep.telescoped, n * std::abs(p_end.p(s, t, x) - tail * p0.p(s, t, x)));
                mass.add(p_end.p(s, t, x));
            }
        }
    }
    rep.roi_end_mass = mass.value();
    return rep;
}

}  // namespace diracwalk
