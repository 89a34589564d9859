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
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "diracwalk/lattice.hpp"
#include "diracwalk/transitions.hpp"

namespace diracwalk {

// One walker on the unbounded lattice. State is 1-based.
struct Walker {
    std::int64_t t = 0;
    std::int64_t x = 0;
    int state = 1;
    std::int64_t lambda = 0;

    friend bool operator==(const Walker&, const Walker&) = default;
};

using Trajectory = std::vector<Walker>;

// An outgoing move: walker displacement and destination state (1-based).
struct Branch {
    int dt = 0;
    int dx = 0;
    int to_state = 0;

    friend bool operator==(const Branch&, const Branch&) = default;
};

// Per source state, the branch that moves forward in t and the one that
// moves backward.
struct FlowTable {
    std::array<Branch, 4> forward;
    std::array<Branch, 4> backward;
};

// Reads the flows column by column from a transition set: entry (r, c) of
// T^(a,b) moves mass from state c to state r with displacement (-a, -b).
template <typename T>
FlowTable flow_table_from(const BasicTransitionSet<T>& ts) {
    FlowTable table;
    std::array<int, 4> seen_fwd{}, seen_bwd{};
    for (std::size_t i = 0; i < 4; ++i) {
        const HopLabel h = kLightConeHops[i];
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                if (scalar_cast<double>(ts.hops[i](static_cast<std::size_t>(r), static_cast<std::size_t>(c))) == 0.0) {
                    continue;
                }
                const Branch b{-h.a, -h.b, r + 1};
                if (b.dt > 0) {
                    table.forward[static_cast<std::size_t>(c)] = b;
                    ++seen_fwd[static_cast<std::size_t>(c)];
                } else {
                    table.backward[static_cast<std::size_t>(c)] = b;
                    ++seen_bwd[static_cast<std::size_t>(c)];
                }
            }
        }
    }
    for (std::size_t c = 0; c < 4; ++c) {
        if (seen_fwd[c] != 1 || seen_bwd[c] != 1) {
            throw std::invalid_argument("flow_table_from: each source state needs exactly one forward and one "
                                        "backward branch");
        }
    }
    return table;
}

inline const FlowTable& canonical_flow_table() {
    static const FlowTable table = flow_table_from(canonical_transitions());
    return table;
}

// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of walker `index`'s private stream.
inline std::uint64_t walker_stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

inline constexpr const char* kRngDescription =
    "std::mt19937_64 per walker, seeded with splitmix64(seed ^ splitmix64(walker_index)); "
    "uniform = (next() >> 11) * 2^-53";

using WalkerRng = std::mt19937_64;

inline double uniform01(WalkerRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// One ordinal step. The t-forward branch is taken with probability (1+eps)/2.
inline Walker step_walker(const Walker& w, double epsilon, WalkerRng& rng, bool* went_forward = nullptr) {
    if (w.state < 1 || w.state > 4) throw std::invalid_argument("step_walker: state must be 1..4");
    const FlowTable& table = canonical_flow_table();
    const bool fwd = uniform01(rng) < 0.5 * (1.0 + epsilon);
    if (went_forward) *went_forward = fwd;
    const Branch& b = fwd ? table.forward[static_cast<std::size_t>(w.state - 1)]
                          : table.backward[static_cast<std::size_t>(w.state - 1)];
    return Walker{w.t + b.dt, w.x + b.dx, b.to_state, w.lambda + 1};
}

inline Trajectory simulate_trajectory(const Walker& init, std::int64_t horizon, double epsilon, std::uint64_t seed,
                                      std::uint64_t stream = 0) {
    if (horizon < 0) throw std::invalid_argument("simulate_trajectory: horizon must be >= 0");
    WalkerRng rng(walker_stream_seed(seed, stream));
    Trajectory traj;
    traj.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.push_back(init);
    for (std::int64_t l = 0; l < horizon; ++l) traj.push_back(step_walker(traj.back(), epsilon, rng));
    return traj;
}

// ---------------------------------------------------------------------------
// Trajectory checks
// ---------------------------------------------------------------------------

struct AlternationResult {
    bool passed = true;
    std::optional<std::size_t> first_violation;  // index i of the failing pair (i, i+1)
    std::string message;
};

// Verifies that every hop is a unit light-cone hop consistent with the flow
// table, that hops alternate between the t = x and t = -x diagonals, and
// that the state alternates between {1,3} and {2,4}.
inline AlternationResult alternation_check(const Trajectory& traj) {
    AlternationResult res;
    if (traj.size() < 2) {
        res.passed = false;
        res.message = "trajectory needs at least two records";
        return res;
    }
    const FlowTable& table = canonical_flow_table();
    auto fail = [&](std::size_t i, std::string why) {
        res.passed = false;
        res.first_violation = i;
        res.message = "step " + std::to_string(i) + ": " + why;
        return res;
    };
    std::optional<bool> prev_main_diagonal;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const Walker& a = traj[i];
        const Walker& b = traj[i + 1];
        const std::int64_t dt = b.t - a.t;
        const std::int64_t dx = b.x - a.x;
        if (std::abs(dt) != 1 || std::abs(dx) != 1) return fail(i, "hop is not a unit light-cone hop");
        if (b.lambda != a.lambda + 1) return fail(i, "ordinal time does not advance by one");
        if (a.state < 1 || a.state > 4 || b.state < 1 || b.state > 4) return fail(i, "invalid state");
        const Branch taken{static_cast<int>(dt), static_cast<int>(dx), b.state};
        const auto s = static_cast<std::size_t>(a.state - 1);
        if (!(taken == table.forward[s]) && !(taken == table.backward[s])) {
            return fail(i, "transition " + std::to_string(a.state) + "->" + std::to_string(b.state) +
                               " with this hop is not in the flow table");
        }
        if ((a.state % 2) == (b.state % 2)) return fail(i, "state class did not alternate");
        const bool main_diagonal = dt == dx;
        if (prev_main_diagonal && *prev_main_diagonal == main_diagonal) {
            return fail(i, "two consecutive hops on the same diagonal");
        }
        prev_main_diagonal = main_diagonal;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Collapse observer
// ---------------------------------------------------------------------------

struct Observation {
    std::int64_t x = 0;
    std::int64_t lambda = 0;
};

// For each visited t slice, the position of the visit with the latest ordinal time.
struct ObservationRecord {
    std::map<std::int64_t, Observation> slices;

    // Fraction of integer t in [t_begin, t_end] that have an observation.
    double visited_fraction(std::int64_t t_begin, std::int64_t t_end) const {
        if (t_end < t_begin) return 0.0;
        std::int64_t hit = 0;
        for (std::int64_t t = t_begin; t <= t_end; ++t) hit += slices.count(t) ? 1 : 0;
        return static_cast<double>(hit) / static_cast<double>(t_end - t_begin + 1);
    }
};

inline ObservationRecord observe_collapse(const Trajectory& traj) {
    ObservationRecord rec;
    for (const Walker& w : traj) {
        auto [it, inserted] = rec.slices.try_emplace(w.t, Observation{w.x, w.lambda});
        if (!inserted && w.lambda > it->second.lambda) it->second = Observation{w.x, w.lambda};
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

struct EnsembleConfig {
    std::int64_t walkers = 1;
    std::int64_t horizon = 0;
    Walker init{};
    double epsilon = 0.0;
    std::uint64_t seed = 42;
    int nt = 256;  // histogram lattice, positions wrap modulo (nt, nx)
    int nx = 256;
    std::vector<std::int64_t> record_lambdas;  // defaults to {horizon}
    std::size_t stored_trajectories = 0;       // first N walkers keep their full path
    std::size_t max_stored_records = std::size_t{1} << 26;
    unsigned threads = 1;
};

struct EnsembleSummary {
    std::vector<std::int64_t> lambdas;
    std::vector<ProbField> histograms;  // empirical occupation at each recorded lambda
    std::uint64_t steps = 0;
    std::uint64_t light_cone_violations = 0;
    std::uint64_t alternation_violations = 0;
    std::array<std::uint64_t, 4> branch_total{};    // steps taken from each source state
    std::array<std::uint64_t, 4> branch_forward{};  // of those, forward in t
    std::vector<Trajectory> trajectories;
};

// Runs independent walkers on private streams. Counts are integers merged
// by addition, so the summary is identical for any thread count.
inline EnsembleSummary run_ensemble(const EnsembleConfig& cfg) {
    if (cfg.walkers < 1) throw std::invalid_argument("run_ensemble: need at least one walker");
    if (cfg.horizon < 0) throw std::invalid_argument("run_ensemble: horizon must be >= 0");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw std::invalid_argument("run_ensemble: epsilon must be in [0,1)");
    if (cfg.nt <= 0 || cfg.nx <= 0) throw std::invalid_argument("run_ensemble: histogram lattice must be nonempty");
    const std::size_t stored = std::min<std::size_t>(cfg.stored_trajectories, static_cast<std::size_t>(cfg.walkers));
    if (static_cast<double>(stored) * static_cast<double>(cfg.horizon + 1) > static_cast<double>(cfg.max_stored_records)) {
        throw CapacityError("run_ensemble: storing " + std::to_string(stored) + " trajectories of " +
                            std::to_string(cfg.horizon + 1) + " records exceeds the limit of " +
                            std::to_string(cfg.max_stored_records));
    }

    EnsembleSummary sum;
    sum.lambdas = cfg.record_lambdas.empty() ? std::vector<std::int64_t>{cfg.horizon} : cfg.record_lambdas;
    std::sort(sum.lambdas.begin(), sum.lambdas.end());
    sum.lambdas.erase(std::unique(sum.lambdas.begin(), sum.lambdas.end()), sum.lambdas.end());
    for (auto l : sum.lambdas) {
        if (l < 0 || l > cfg.horizon) throw std::invalid_argument("run_ensemble: recorded lambda outside [0, horizon]");
    }
    // slot[l] = index into lambdas or -1
    std::vector<int> slot(static_cast<std::size_t>(cfg.horizon) + 1, -1);
    for (std::size_t i = 0; i < sum.lambdas.size(); ++i) slot[static_cast<std::size_t>(sum.lambdas[i])] = static_cast<int>(i);

    const std::size_t cells = std::size_t{4} * cfg.nt * cfg.nx;
    struct Partial {
        std::vector<std::uint64_t> counts;
        std::uint64_t steps = 0, light_cone = 0, alternation = 0;
        std::array<std::uint64_t, 4> total{}, forward{};
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.walkers)));
    std::vector<Partial> parts(threads);
    sum.trajectories.resize(stored);

    auto bin = [&](const Walker& w) {
        return (static_cast<std::size_t>(w.state - 1) * cfg.nt + static_cast<std::size_t>(wrap_index(w.t, cfg.nt))) *
                   cfg.nx +
               static_cast<std::size_t>(wrap_index(w.x, cfg.nx));
    };

    auto work = [&](unsigned tid) {
        Partial& part = parts[tid];
        part.counts.assign(cells * sum.lambdas.size(), 0);
        const std::int64_t begin = cfg.walkers * tid / threads;
        const std::int64_t end = cfg.walkers * (tid + 1) / threads;
        for (std::int64_t i = begin; i < end; ++i) {
            WalkerRng rng(walker_stream_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            Walker w = cfg.init;
            w.lambda = 0;
            Trajectory* traj = static_cast<std::size_t>(i) < stored ? &sum.trajectories[static_cast<std::size_t>(i)] : nullptr;
            if (traj) {
                traj->reserve(static_cast<std::size_t>(cfg.horizon) + 1);
                traj->push_back(w);
            }
            int prev_diag = 0;  // +1 main, -1 anti, 0 none yet
            for (std::int64_t l = 0;; ++l) {
                const int s = slot[static_cast<std::size_t>(l)];
                if (s >= 0) ++part.counts[static_cast<std::size_t>(s) * cells + bin(w)];
                if (l == cfg.horizon) break;
                bool fwd = false;
                const Walker next = step_walker(w, cfg.epsilon, rng, &fwd);
                ++part.steps;
                ++part.total[static_cast<std::size_t>(w.state - 1)];
                if (fwd) ++part.forward[static_cast<std::size_t>(w.state - 1)];
                const std::int64_t dt = next.t - w.t, dx = next.x - w.x;
                if (std::abs(dt) != 1 || std::abs(dx) != 1) ++part.light_cone;
                const int diag = dt == dx ? 1 : -1;
                if (diag == prev_diag || (w.state % 2) == (next.state % 2)) ++part.alternation;
                prev_diag = diag;
                w = next;
                if (traj) traj->push_back(w);
            }
        }
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
        for (auto& th : pool) th.join();
    }

    std::vector<std::uint64_t> counts(cells * sum.lambdas.size(), 0);
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += part.counts[i];
        sum.steps += part.steps;
        sum.light_cone_violations += part.light_cone;
        sum.alternation_violations += part.alternation;
        for (std::size_t s = 0; s < 4; ++s) {
            sum.branch_total[s] += part.total[s];
            sum.branch_forward[s] += part.forward[s];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(cfg.walkers);
    for (std::size_t i = 0; i < sum.lambdas.size(); ++i) {
        ProbField h(cfg.nt, cfg.nx, sum.lambdas[i]);
        auto v = h.p.values();
        for (std::size_t c = 0; c < cells; ++c) v[c] = static_cast<double>(counts[i * cells + c]) * inv_n;
        sum.histograms.push_back(std::move(h));
    }
    return sum;
}

// 1/2 sum |a - b|
inline double total_variation(const ProbField& a, const ProbField& b) {
    if (!a.p.same_shape(b.p)) throw std::invalid_argument("total_variation: shape mismatch");
    detail::CompensatedSum s;
    const auto av = a.p.values();
    const auto bv = b.p.values();
    for (std::size_t i = 0; i < av.size(); ++i) s.add(std::abs(av[i] - bv[i]));
    return 0.5 * s.value();
}

}  // namespace diracwalk
