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

// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// here and do not read any configuration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "diracwalk/diracwalk.hpp"

namespace dw = diracwalk;
namespace fs = std::filesystem;

namespace {

constexpr double kMassPerStep = 1e-12;
constexpr double kPriorSum = 1e-14;
constexpr double kTelescoping = 1e-12;
constexpr double kBlock = 1e-12;
constexpr double kRootVsClosedForm = 1e-10;
constexpr double kEinsteinRel = 0.01;
constexpr double kEigenmodeResidual = 1e-10;
constexpr double kDeterminant = 1e-12;
constexpr double kBreakdownRatio = 10.0;
constexpr double kOrder = 1.8;
constexpr double kSliceSpread = 1e-12;
constexpr double kTv = 0.02;
constexpr double kSigma = 3.0;
constexpr double kDeriveSeconds = 1.0;
constexpr double kTelescopingSeconds = 5.0;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) { return dw::io::format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Expected hop matrix: 1-based entries equal to 1/2.
dw::Mat4 hop(std::initializer_list<std::pair<int, int>> at) {
    dw::Mat4 m;
    for (auto [r, c] : at) m(r - 1, c - 1) = dw::Rational(1, 2);
    return m;
}

Outcome derivation_uniqueness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = dw::derive_transitions();
    const auto rep = dw::constraint_report(dw::canonical_transitions(), 0.1);
    const double secs = seconds_since(t0);
    bool ok = d.feasible && d.solution && d.solution_count == 1;
    if (ok) {
        const auto& s = *d.solution;
        ok = s.t00 == dw::Mat4::zero() && s.hop({1, -1}) == hop({{1, 2}, {3, 4}}) &&
             s.hop({-1, 1}) == hop({{1, 4}, {3, 2}}) && s.hop({1, 1}) == hop({{2, 3}, {4, 1}}) &&
             s.hop({-1, -1}) == hop({{2, 1}, {4, 3}});
    }
    const double drift = std::max(rep.residual("time_drift_constraint").value, rep.residual("space_drift_constraint").value);
    ok = ok && drift == 0.0 && secs < kDeriveSeconds;
    return {ok, "solutions=" + std::to_string(d.solution_count) + " drift_residual=" + fmt(drift) +
                    " seconds=" + fmt(secs)};
}

Outcome discrepancy_ledger() {
    const auto rep = dw::constraint_report(dw::canonical_transitions(), 0.1);
    const dw::Rational h(1, 2);
    const dw::Mat4d actual = (h * dw::kron(dw::identity2() + dw::sigma_x(), dw::sigma_x())).cast<double>();
    const dw::Mat4d deviation = (h * dw::kron(dw::sigma_x(), dw::sigma_x())).cast<double>();
    const dw::Mat4d sum = dw::to_floating(dw::canonical_transitions()).total();
    bool flagged = false;
    for (const auto& n : rep.discrepancies) {
        if (n.name == "hop_sum_printed_form") {
            flagged = dw::max_abs_diff(n.actual, actual) == 0.0 && dw::max_abs_diff(n.deviation, deviation) == 0.0;
        }
    }
    const bool ok = flagged && dw::max_abs_diff(sum, actual) == 0.0 && rep.all_passed();
    return {ok, std::string("flagged=") + (flagged ? "1" : "0") + " report_passed=" + (rep.all_passed() ? "1" : "0")};
}

Outcome stochastic_conservation() {
    double worst = 0.0;
    double min_value = 0.0;
    for (double eps : {0.0, 0.1}) {
        const auto ts = dw::apply_bias(dw::canonical_transitions(), eps);
        const dw::StepPlan plan(ts);
        auto cur = dw::init_random(dw::LatticeSpec{64, 64, 0.1}, kSeed);
        dw::ProbField next(64, 64);
        double prev = cur.total_mass();
        for (int l = 0; l < 1000; ++l) {
            dw::step_into(cur.p, next.p, plan);
            std::swap(cur, next);
            const double m = cur.total_mass();
            worst = std::max(worst, std::abs(m - prev));
            prev = m;
        }
        min_value = std::min(min_value, cur.min_value());
    }
    return {worst <= kMassPerStep && min_value >= 0.0, "max_step_drift=" + fmt(worst)};
}

Outcome prior_normalization() {
    double worst = 0.0;
    for (double mu : {0.1, 0.5, 0.9}) {
        for (std::int64_t lambda : {0, 1, 50, 200}) {
            const dw::OrdinalPrior prior(mu, lambda);
            const double s = dw::detail::compensated_sum(prior.weights());
            worst = std::max(worst, std::abs(s - 1.0));
        }
    }
    return {worst <= kPriorSum, "max_abs_sum_error=" + fmt(worst)};
}

Outcome telescoping_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ts = dw::to_floating(dw::canonical_transitions());
    double worst = 0.0;
    std::uint64_t seed = kSeed;
    for (double mu : {0.1, 0.5, 0.9}) {
        const auto f = dw::init_random(dw::LatticeSpec{64, 64, mu}, seed++);
        const dw::OrdinalPrior prior(mu, 100);
        const auto run = dw::evolve_averaged(f, ts, prior);
        worst = std::max(worst, dw::telescoping_residual(run.average, run.initial, run.beyond, ts, prior));
    }
    const double secs = seconds_since(t0);
    return {worst <= kTelescoping && secs < kTelescopingSeconds, "max_residual=" + fmt(worst) + " seconds=" + fmt(secs)};
}

Outcome block_diagonalization() {
    double off = 0.0, ul = 0.0;
    for (double mu : {0.05, 0.1, 0.5}) {
        for (int i = 0; i < 32; ++i) {
            for (int j = 0; j < 32; ++j) {
                const double w = -std::numbers::pi + 2.0 * std::numbers::pi * i / 32.0;
                const double k = -std::numbers::pi + 2.0 * std::numbers::pi * j / 32.0;
                const auto bc = dw::block_check(w, k, mu);
                off = std::max(off, bc.off_block_max);
                // Independent form of the upper-left block: -mu [[1, (i/mu) sin(k-w)], [(i/mu) sin(k+w), 1]].
                const dw::Complex iu(0.0, 1.0);
                const dw::Complex e00 = -mu, e01 = -iu * std::sin(k - w), e10 = -iu * std::sin(k + w), e11 = -mu;
                ul = std::max({ul, std::abs(bc.upper_left(0, 0) - e00), std::abs(bc.upper_left(0, 1) - e01),
                               std::abs(bc.upper_left(1, 0) - e10), std::abs(bc.upper_left(1, 1) - e11)});
            }
        }
    }
    return {off <= kBlock && ul <= kBlock, "off_block_max=" + fmt(off) + " upper_left_dev=" + fmt(ul)};
}

Outcome dispersion() {
    double root_dev = 0.0;
    int roots = 0;
    for (double k : dw::linspace(-1.0, 1.0, 100)) {
        const auto a = dw::lattice_dispersion(k, 0.1);
        if (!a) return {false, "missing root at k=" + fmt(k)};
        root_dev = std::max(root_dev, std::abs(*a - std::asin(std::sqrt(std::sin(k) * std::sin(k) + 0.01))));
        ++roots;
    }
    double worst_rel = 0.0;
    for (const auto& p : dw::dispersion_error_map(0.05, dw::linspace(-0.1, 0.1, 41))) {
        worst_rel = std::max(worst_rel, p.has_root() ? p.rel_error : 1.0);
    }
    bool increasing = true;
    double prev = -1.0;
    for (double mu : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const double r = dw::dispersion_error_map(mu, {0.0}).front().rel_error;
        increasing = increasing && r > prev;
        prev = r;
    }
    return {roots == 100 && root_dev <= kRootVsClosedForm && worst_rel <= kEinsteinRel && increasing,
            "root_dev=" + fmt(root_dev) + " max_rel_error=" + fmt(worst_rel) +
                " k0_monotone=" + (increasing ? "1" : "0")};
}

Outcome eigenmode_bridge() {
    const double mu = 0.05;
    double exact = 0.0, det = 0.0;
    for (double k : {0.0, 0.05, 0.2, 0.5, 1.0}) {
        const auto m = dw::eigenmode(k, mu);
        if (!m) return {false, "no eigenmode at k=" + fmt(k)};
        for (auto part : {dw::ModePart::real, dw::ModePart::imag}) {
            exact = std::max(exact, dw::exact_dirac_residual(m->sample(64, 64, part), mu, dw::EvalMode::interior).max_abs);
        }
        det = std::max(det, std::abs(dw::dirac_determinant(m->omega, k, mu)));
    }
    const double slow = dw::continuum_dirac_residual(dw::eigenmode(0.05, mu)->sample(64, 64), mu, dw::EvalMode::interior).relative();
    const double fast = dw::continuum_dirac_residual(dw::eigenmode(1.0, mu)->sample(64, 64), mu, dw::EvalMode::interior).relative();
    const double ratio = fast / slow;
    return {exact <= kEigenmodeResidual && det <= kDeterminant && ratio >= kBreakdownRatio,
            "exact_residual=" + fmt(exact) + " determinant=" + fmt(det) + " breakdown_ratio=" + fmt(ratio)};
}

// psi1 = ((k-w)/m) sin(wt + kx), psi2 = cos(wt + kx) with w^2 = k^2 + m^2,
// over whole periods.
dw::WaveField plane_wave(int n, double& h) {
    const double k = 2.0, m = 1.0, w = std::sqrt(k * k + m * m);
    h = 2.0 * std::numbers::pi / n;
    dw::WaveField f(n, n);
    for (int t = 0; t < n; ++t) {
        for (int x = 0; x < n; ++x) {
            const double th = w * t * h + k * x * h;
            f.psi(0, t, x) = (k - w) / m * std::sin(th);
            f.psi(1, t, x) = std::cos(th);
        }
    }
    return f;
}

Outcome currents() {
    double res[2] = {0.0, 0.0};
    double spread = 0.0;
    int i = 0;
    for (int n : {64, 128}) {
        double h = 0.0;
        const auto field = plane_wave(n, h);
        const auto rep = dw::continuity_residual(dw::currents(field), h, h, dw::EvalMode::interior);
        res[i++] = rep.max_abs;
        spread = std::max(spread, rep.slice_spread());
    }
    const double order = std::log2(res[0] / res[1]);
    return {order >= kOrder && spread <= kSliceSpread, "order=" + fmt(order) + " slice_spread=" + fmt(spread)};
}

Outcome monte_carlo_fidelity() {
    const int n = 128, c = 64;
    const std::int64_t horizon = 40;
    dw::EnsembleConfig cfg;
    cfg.walkers = 100000;
    cfg.horizon = horizon;
    cfg.init = dw::Walker{c, c, 1, 0};
    cfg.nt = n;
    cfg.nx = n;
    cfg.seed = kSeed;
    cfg.stored_trajectories = 100;
    const auto sum = dw::run_ensemble(cfg);

    auto ref = dw::init_delta(dw::LatticeSpec{n, n, 0.1}, c, c, 1);
    const auto ts = dw::to_floating(dw::canonical_transitions());
    for (std::int64_t l = 0; l < horizon; ++l) ref = dw::step(ref, ts);
    const double tv = dw::total_variation(sum.histograms.front(), ref);

    bool paths = true;
    for (const auto& t : sum.trajectories) paths = paths && dw::alternation_check(t).passed;
    double worst_z = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
        const double total = static_cast<double>(sum.branch_total[s]);
        if (total == 0.0) continue;
        const double z = (static_cast<double>(sum.branch_forward[s]) - 0.5 * total) / std::sqrt(0.25 * total);
        worst_z = std::max(worst_z, std::abs(z));
    }
    const bool ok = tv <= kTv && sum.light_cone_violations == 0 && sum.alternation_violations == 0 && paths &&
                    worst_z <= kSigma && sum.steps == 100000u * 40u;
    return {ok, "tv=" + fmt(tv) + " light_cone_violations=" + std::to_string(sum.light_cone_violations) +
                    " alternation_violations=" + std::to_string(sum.alternation_violations) +
                    " max_branch_z=" + fmt(worst_z)};
}

Outcome collapse_observer() {
    const std::int64_t horizon = 2000;
    const auto traj = dw::simulate_trajectory(dw::Walker{0, 0, 1, 0}, horizon, 0.05, kSeed);
    const auto rec = dw::observe_collapse(traj);
    // Brute force: latest visit per slice.
    std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> latest;
    for (const auto& w : traj) {
        auto it = latest.find(w.t);
        if (it == latest.end() || w.lambda > it->second.second) latest[w.t] = {w.x, w.lambda};
    }
    bool one = latest.size() == rec.slices.size();
    for (const auto& [t, o] : rec.slices) {
        const auto it = latest.find(t);
        one = one && it != latest.end() && it->second.first == o.x && it->second.second == o.lambda;
    }
    const std::string csv = dw::io::observation_csv(rec);
    const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
    const bool emitted = csv.rfind("t_index,x_observed,lambda_last\n", 0) == 0 && rows == rec.slices.size();
    const std::int64_t window_end = horizon / 40;  // eps * Lambda / 2
    return {one && emitted, "slices=" + std::to_string(rec.slices.size()) + " visited_fraction=" +
                                fmt(rec.visited_fraction(0, window_end)) + " final_t=" + std::to_string(traj.back().t)};
}

Outcome reproducibility() {
    const fs::path base = fs::temp_directory_path() / "diracwalk_acceptance";
    fs::remove_all(base);
    const fs::path a = base / "a", b = base / "b";
    std::ostringstream log;
    const int ra = dw::run_cli({"validate", "--seed", std::to_string(kSeed), "--out", a.string()}, log, log);
    const int rb = dw::run_cli({"validate", "--seed", std::to_string(kSeed), "--out", b.string()}, log, log);
    std::size_t compared = 0;
    bool same = ra == 0 && rb == 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        if (name == "timing.json") continue;
        same = same && fs::exists(b / name) && dw::io::read_file(e.path()) == dw::io::read_file(b / name);
        ++compared;
    }
    std::size_t in_b = 0;
    for (const auto& e : fs::directory_iterator(b)) in_b += e.path().filename() != "timing.json";
    same = same && in_b == compared && compared > 1;
    fs::remove_all(base);
    return {same, "files_compared=" + std::to_string(compared) + " exit_codes=" + std::to_string(ra) + "," +
                      std::to_string(rb)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"derivation_uniqueness", derivation_uniqueness},
        {"discrepancy_ledger", discrepancy_ledger},
        {"stochastic_conservation", stochastic_conservation},
        {"prior_normalization", prior_normalization},
        {"telescoping_identity", telescoping_identity},
        {"block_diagonalization", block_diagonalization},
        {"dispersion", dispersion},
        {"eigenmode_bridge", eigenmode_bridge},
        {"currents", currents},
        {"monte_carlo_fidelity", monte_carlo_fidelity},
        {"collapse_observer", collapse_observer},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/12 passed\n", 12 - failed);
    return failed == 0 ? 0 : 1;
}
