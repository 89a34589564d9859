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

#include <chrono>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "diracwalk/io.hpp"
#include "diracwalk/lattice.hpp"
#include "diracwalk/montecarlo.hpp"
#include "diracwalk/report.hpp"
#include "diracwalk/run_config.hpp"
#include "diracwalk/spectral.hpp"
#include "diracwalk/transitions.hpp"
#include "diracwalk/validation.hpp"
#include "diracwalk/wavefunction.hpp"

namespace diracwalk {

struct CommandResult {
    CheckList checks;
    Json result = Json::object();
    std::vector<validation::Table> tables;
};

inline Json conventions() {
    Json c;
    c["heaviside"] = "Theta(x) = 1 for x >= 0";
    c["shift"] = "T^(a,b) multiplies p(t+a, x+b); a walker taking that hop moves by (-a, -b)";
    c["fourier"] = "shift E(a,b) -> exp(i(a omega + b k)); plane waves exp(i(omega t + k x)), lattice units";
    c["kronecker"] = "kron(A,B) has block (i,j) = A(i,j) B; states ordered 1..4";
    c["gamma"] = "psi = Gamma p with Gamma = [[I, -I], [G, G]], G = [[1,-1],[1,1]]";
    c["current"] = "rho = psi1^2 + psi2^2, j = psi1^2 - psi2^2";
    c["units"] = "lattice units dt = dx = 1; dx = mu hbar / (m c), dt = mu hbar / (m c^2)";
    c["bias"] = "the branch moving forward in t has probability (1 + epsilon)/2";
    c["rng"] = kRngDescription;
    c["csv"] = "comma separated, '\\n' line endings, 17 significant digits, header-only when empty";
    return c;
}

inline Json config_json(const RunConfig& c) {
    Json j;
    j["mu"] = c.mu;
    j["epsilon"] = c.epsilon;
    j["Lambda"] = c.lambda;
    j["nt"] = c.nt;
    j["nx"] = c.nx;
    j["seed"] = c.seed;
    j["init"] = c.init;
    j["init_state"] = c.init_state;
    j["t0"] = c.resolved_t0();
    j["x0"] = c.resolved_x0();
    j["width"] = c.width;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["k_count"] = c.k_count;
    j["roi"] = Json::array({c.roi_t_begin, c.roi_t_end, c.roi_x_begin, c.roi_x_end});
    j["walkers"] = c.walkers;
    j["store_trajectories"] = c.stored_trajectories;
    j["threads"] = c.threads;
    j["mass_ev"] = c.mass_eV;
    j["config_file"] = c.config_file;
    Json t;
    t["exact"] = c.tol.exact;
    t["mass"] = c.tol.mass;
    t["prior"] = c.tol.prior;
    t["eigenmode"] = c.tol.eigenmode;
    t["round_trip"] = c.tol.round_trip;
    t["dispersion"] = c.tol.dispersion;
    t["tv"] = c.tol.tv;
    t["order"] = c.tol.order;
    j["tolerances"] = t;
    return j;
}

inline Json residual_json(const ResidualSummary& r) {
    return Json{{"max_abs", r.max_abs}, {"field_scale", r.field_scale}, {"relative", r.relative()}};
}

// ---------------------------------------------------------------------------

inline CommandResult cmd_derive(const RunConfig& cfg) {
    CommandResult out;
    const std::string m = "transitions";
    const auto d = derive_transitions();
    const auto canon = canonical_transitions();
    Json deriv;
    deriv["feasible"] = d.feasible;
    deriv["unique"] = d.unique();
    deriv["solution_count"] = d.solution_count;
    deriv["assignments_checked"] = d.assignments_checked;
    deriv["reason"] = d.reason;
    out.result["derivation"] = deriv;
    out.checks.holds(m, "derivation_unique", "derive_transitions", d.unique());
    out.checks.holds(m, "derivation_matches_canonical", "derive_transitions", d.solution && *d.solution == canon);
    const ExactTransitionSet& ts = d.solution ? *d.solution : canon;

    Json mats;
    mats["T(0,0)"] = matrix_json(ts.t00);
    for (std::size_t i = 0; i < 4; ++i) mats["T" + to_string(kLightConeHops[i])] = matrix_json(ts.hops[i]);
    out.result["transitions"] = mats;

    const auto rep = constraint_report(ts, cfg.mu);
    Json r;
    r["kappa_mu"] = rep.kappa_mu;
    r["mu"] = rep.mu;
    r["c1"] = rep.c1;
    r["c2"] = rep.c2;
    r["S_sigma"] = matrix_json(rep.s_sigma);
    r["S_t"] = matrix_json(rep.s_t);
    r["S_x"] = matrix_json(rep.s_x);
    r["R_m"] = matrix_json(rep.r_m);
    r["R_m_tilde"] = matrix_json(rep.r_m_tilde);
    r["R_tt"] = matrix_json(rep.r_tt);
    r["R_tt_tilde"] = matrix_json(rep.r_tt_tilde);
    r["R_t_tilde"] = matrix_json(rep.r_t_tilde);
    r["R_x_tilde"] = matrix_json(rep.r_x_tilde);
    r["residuals"] = Json::array();
    for (const auto& res : rep.residuals) {
        r["residuals"].push_back(Json{{"name", res.name},
                                      {"description", res.description},
                                      {"value", res.value},
                                      {"tolerance", res.tolerance},
                                      {"passed", res.passed()}});
        out.checks.at_most(m, res.name, "constraint_report", res.value, res.tolerance);
    }
    r["discrepancies"] = Json::array();
    for (const auto& disc : rep.discrepancies) {
        r["discrepancies"].push_back(Json{{"name", disc.name},
                                          {"description", disc.description},
                                          {"actual", matrix_json(disc.actual)},
                                          {"printed", matrix_json(disc.printed)},
                                          {"deviation", matrix_json(disc.deviation)},
                                          {"max_abs", disc.max_abs}});
        out.checks.discrepancy(m, disc.name, disc.description, disc.max_abs);
    }
    out.result["constraint_report"] = r;

    out.checks.holds(m, "infeasible_at_kappa_mu_1/2", "derive_transitions", !derive_transitions(Rational(1, 2)).feasible);
    out.checks.holds(m, "infeasible_at_kappa_mu_2", "derive_transitions", !derive_transitions(Rational(2)).feasible);
    return out;
}

inline CommandResult cmd_dispersion(const RunConfig& cfg) {
    CommandResult out;
    const std::string m = "spectral";
    const auto ks = linspace(cfg.k_min, cfg.k_max, cfg.k_count);
    const auto points = dispersion_error_map(cfg.mu, ks);
    double closed = 0.0;
    double regime_err = 0.0, small_k_err = 0.0;
    std::size_t roots = 0, in_regime = 0;
    for (const auto& p : points) {
        if (!p.has_root()) continue;
        ++roots;
        closed = std::max(closed, std::abs(p.omega_lattice - *lattice_dispersion_closed_form(p.k, cfg.mu)));
        if (p.in_regime) {
            ++in_regime;
            regime_err = std::max(regime_err, p.rel_error);
        }
        if (std::abs(p.k) <= 0.1) small_k_err = std::max(small_k_err, p.rel_error);
    }
    out.checks.at_most(m, "root_matches_closed_form", "lattice_dispersion", closed, 1e-10);
    if (in_regime > 0) {
        out.checks.at_most(m, "einstein_agreement_in_regime", "dispersion_error_map", regime_err, cfg.tol.dispersion);
    }
    out.result["points"] = points.size();
    out.result["points_with_root"] = roots;
    out.result["points_in_regime"] = in_regime;
    out.result["max_rel_error_in_regime"] = regime_err;
    out.result["max_rel_error_abs_k_le_0.1"] = small_k_err;
    const auto u = physical_units(cfg.mass_eV, cfg.mu);
    out.result["units"] = Json{{"mass_ev", cfg.mass_eV}, {"dx_m", u.dx_m}, {"dt_s", u.dt_s}};
    out.tables.push_back({"dispersion.csv", io::dispersion_csv(points)});
    return out;
}

inline CommandResult cmd_units(const RunConfig& cfg) {
    CommandResult out;
    const std::string m = "spectral";
    const auto u = physical_units(cfg.mass_eV, cfg.mu);
    out.result["mass_ev"] = cfg.mass_eV;
    out.result["mu"] = cfg.mu;
    out.result["dx_m"] = u.dx_m;
    out.result["dt_s"] = u.dt_s;
    out.result["reduced_compton_m"] = u.reduced_compton_m;
    out.result["compton_fraction"] = u.compton_fraction;
    out.result["hbar_c_ev_m"] = kHbarCeVm;
    out.result["hbar_ev_s"] = kHbareVs;
    out.checks.at_most(m, "dx_over_reduced_compton_is_mu", "physical_units",
                       std::abs(u.dx_m / u.reduced_compton_m - cfg.mu) / cfg.mu, 1e-15);
    out.checks.at_most(m, "dx_over_dt_is_c", "physical_units", std::abs(u.dx_m / u.dt_s / 299792458.0 - 1.0), 1e-9);
    return out;
}

inline ProbField initial_field(const RunConfig& cfg) {
    const LatticeSpec spec{cfg.nt, cfg.nx, cfg.mu};
    if (cfg.init == "packet") {
        std::array<double, 4> mix{};
        mix[static_cast<std::size_t>(cfg.init_state - 1)] = 1.0;
        return init_packet(spec, cfg.resolved_t0(), cfg.resolved_x0(), cfg.width, mix);
    }
    if (cfg.init == "random") return init_random(spec, cfg.seed);
    return init_delta(spec, cfg.resolved_t0(), cfg.resolved_x0(), cfg.init_state);
}

inline CommandResult cmd_evolve(const RunConfig& cfg) {
    CommandResult out;
    const LatticeSpec spec{cfg.nt, cfg.nx, cfg.mu};
    spec.validate();
    const auto ts = apply_bias(canonical_transitions(), cfg.epsilon);
    const OrdinalPrior prior(cfg.mu, cfg.lambda);
    const ProbField f0 = initial_field(cfg);
    const OrdinalRun run = evolve_averaged(f0, ts, prior);

    double drift = 0.0;
    for (std::size_t i = 1; i < run.mass.size(); ++i) drift = std::max(drift, std::abs(run.mass[i] - run.mass[i - 1]));
    out.checks.at_most("lattice", "mass_conservation_per_step", "evolve_averaged", drift, cfg.tol.mass);
    out.checks.at_least("lattice", "nonnegativity", "evolve_averaged",
                        std::min(run.average.min_value(), run.beyond.min_value()), 0.0);
    out.checks.at_most("lattice", "prior_normalization", "OrdinalPrior",
                       std::abs(detail::compensated_sum(prior.weights()) - 1.0), cfg.tol.prior);
    out.checks.at_most("lattice", "telescoping_identity", "telescoping_residual",
                       telescoping_residual(run.average, run.initial, run.beyond, ts, prior), cfg.tol.exact);

    const RegionOfInterest roi = (cfg.roi_t_end == 0 && cfg.roi_x_end == 0)
                                     ? RegionOfInterest::whole(cfg.nt, cfg.nx)
                                     : RegionOfInterest{cfg.roi_t_begin, cfg.roi_t_end, cfg.roi_x_begin, cfg.roi_x_end};
    const auto er = eigen_relation_residual(run.average, run.initial, run.beyond, ts, prior, roi);
    out.result["eigen_relation"] = Json{{"roi", Json::array({roi.t_begin, roi.t_end, roi.x_begin, roi.x_end})},
                                        {"residual", er.residual},
                                        {"end_term", er.end_term},
                                        {"telescoped", er.telescoped},
                                        {"roi_end_mass", er.roi_end_mass}};

    const WaveField psi = extract(run.average, "ordinal average, lambda = 0.." + std::to_string(cfg.lambda));
    out.checks.at_most("wavefunction", "gamma_round_trip", "extract, to_probabilities",
                       max_abs_diff(to_probabilities(psi).p, run.average.p), cfg.tol.round_trip);
    if (cfg.epsilon == 0.0) {
        // The lattice Dirac rows are -(1/mu) Gamma (T - mu I) pbar, which telescopes.
        ProbField r = step(run.average, ts);
        auto rv = r.p.values();
        const auto av = run.average.p.values();
        for (std::size_t i = 0; i < rv.size(); ++i) rv[i] -= cfg.mu * av[i];
        const WaveField gr = extract(r);
        const Grid4 eq = lattice_equations(psi, cfg.mu);
        double chain = 0.0;
        for (int t = 0; t < cfg.nt; ++t)
            for (int x = 0; x < cfg.nx; ++x) {
                for (int c = 0; c < 2; ++c) chain = std::max(chain, std::abs(eq(c, t, x) + gr.psi(c, t, x) / cfg.mu));
                for (int c = 2; c < 4; ++c) chain = std::max(chain, std::abs(eq(c, t, x) - gr.psi(c, t, x)));
            }
        out.checks.at_most("wavefunction", "exact_identity_chain", "lattice_equations", chain, cfg.tol.exact);
    }
    out.result["exact_dirac_residual"] = residual_json(exact_dirac_residual(psi, cfg.mu));
    out.result["auxiliary_residual"] = residual_json(auxiliary_residual(psi, cfg.mu));
    out.result["continuum_dirac_residual"] = residual_json(continuum_dirac_residual(psi, cfg.mu));
    const CurrentField cur = currents(psi);
    const auto cont = continuity_residual(cur);
    out.result["continuity"] = Json{{"max_abs", cont.max_abs}, {"slice_spread", cont.slice_spread()}};
    out.result["mass_initial"] = run.mass.front();
    out.result["mass_final"] = run.mass.back();
    out.result["prior_normalization"] = prior.normalization();
    out.result["wrap_free"] = spec.wrap_free_for(cfg.lambda + 1);

    out.tables.push_back({"pbar.csv", io::prob_field_csv(run.average)});
    out.tables.push_back({"field_end.csv", io::prob_field_csv(run.beyond)});
    out.tables.push_back({"psi.csv", io::wave_field_csv(psi)});
    out.tables.push_back({"currents.csv", io::current_csv(cur)});
    return out;
}

// Largest deterministic reference (cells x steps) that `walk` computes for
// the total-variation comparison.
inline constexpr double kReferenceBudget = 2e9;

inline CommandResult cmd_walk(const RunConfig& cfg) {
    CommandResult out;
    const std::string m = "montecarlo";
    EnsembleConfig ec;
    ec.walkers = cfg.walkers;
    ec.horizon = cfg.lambda;
    ec.init = Walker{cfg.resolved_t0(), cfg.resolved_x0(), cfg.init_state, 0};
    ec.epsilon = cfg.epsilon;
    ec.seed = cfg.seed;
    ec.nt = cfg.nt;
    ec.nx = cfg.nx;
    ec.stored_trajectories = std::max<std::size_t>(cfg.stored_trajectories, 1);
    ec.threads = cfg.threads;
    const auto sum = run_ensemble(ec);

    // Deterministic reference on the same (possibly wrapping) lattice,
    // skipped when it would dwarf the ensemble itself.
    const double cell_steps = 4.0 * cfg.nt * cfg.nx * static_cast<double>(cfg.lambda);
    if (cell_steps <= kReferenceBudget) {
        const auto ts = apply_bias(canonical_transitions(), cfg.epsilon);
        ProbField ref =
            init_delta(LatticeSpec{cfg.nt, cfg.nx, cfg.mu}, cfg.resolved_t0(), cfg.resolved_x0(), cfg.init_state);
        const StepPlan plan(ts);
        ProbField next(cfg.nt, cfg.nx);
        for (std::int64_t l = 0; l < cfg.lambda; ++l) {
            step_into(ref.p, next.p, plan);
            std::swap(ref, next);
        }
        out.result["total_variation"] = total_variation(sum.histograms.front(), ref);
    } else {
        out.result["total_variation"] = nullptr;
        out.result["total_variation_skipped"] = "reference evolution of " + io::format_double(cell_steps) +
                                                " cell-steps exceeds " + io::format_double(kReferenceBudget);
    }
    out.result["steps"] = sum.steps;

    out.checks.at_most(m, "light_cone_violations", "run_ensemble", static_cast<double>(sum.light_cone_violations), 0.0);
    out.checks.at_most(m, "alternation_violations", "run_ensemble", static_cast<double>(sum.alternation_violations), 0.0);
    bool traj_ok = true;
    for (const auto& t : sum.trajectories) traj_ok = traj_ok && (t.size() < 2 || alternation_check(t).passed);
    out.checks.holds(m, "stored_trajectories_alternate", "alternation_check", traj_ok);

    const double p = 0.5 * (1.0 + cfg.epsilon);
    double worst_z = 0.0;
    Json freq = Json::array();
    for (std::size_t s = 0; s < 4; ++s) {
        const double total = static_cast<double>(sum.branch_total[s]);
        if (total == 0.0) {
            freq.push_back(nullptr);
            continue;
        }
        const double f = static_cast<double>(sum.branch_forward[s]) / total;
        freq.push_back(f);
        worst_z = std::max(worst_z, std::abs(f - p) / std::sqrt(p * (1.0 - p) / total));
    }
    out.result["forward_frequency_by_state"] = freq;
    if (sum.steps > 0) out.checks.at_most(m, "branch_frequency_sigma", "step_walker", worst_z, 3.0);

    const Trajectory& first = sum.trajectories.front();
    const ObservationRecord rec = observe_collapse(first);
    out.checks.holds(m, "collapse_one_position_per_slice", "observe_collapse",
                     rec.slices.size() == [&] {
                         std::map<std::int64_t, int> seen;
                         for (const auto& w : first) seen[w.t] = 1;
                         return seen.size();
                     }());
    const auto t0 = first.front().t;
    const auto window_end = t0 + static_cast<std::int64_t>(std::floor(cfg.lambda * cfg.epsilon / 2.0));
    out.result["collapse"] = Json{{"window", Json::array({t0, window_end})},
                                  {"visited_fraction", rec.visited_fraction(t0, window_end)},
                                  {"slices_observed", rec.slices.size()},
                                  {"final_t", first.back().t},
                                  {"wrap_free_lattice", cfg.nt > 2 * (cfg.lambda + 1)}};

    out.tables.push_back({"trajectory.csv", io::trajectory_csv(first)});
    out.tables.push_back({"observation.csv", io::observation_csv(rec)});
    out.tables.push_back({"histogram.csv", io::histogram_csv(sum)});
    return out;
}

inline CommandResult cmd_validate(const RunConfig& cfg) {
    CommandResult out;
    auto suite = validation::run_all(cfg);
    out.checks = std::move(suite.list);
    out.tables = std::move(suite.tables);
    out.tables.push_back({"checks.csv", checks_csv(out.checks)});
    return out;
}

// ---------------------------------------------------------------------------

// Runs the configured subcommand, writes manifest.json (always), the
// command's CSV tables and timing.json into the output directory, and
// returns the exit code: 0 when every check passes, 1 otherwise.
inline int dispatch(const RunConfig& cfg, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    Json manifest;
    manifest["tool"] = "diracwalk";
    manifest["version"] = kVersion;
    manifest["subcommand"] = cfg.subcommand;
    manifest["config"] = config_json(cfg);
    manifest["conventions"] = conventions();

    CommandResult res;
    std::string error;
    try {
        if (cfg.subcommand == "derive") res = cmd_derive(cfg);
        else if (cfg.subcommand == "validate") res = cmd_validate(cfg);
        else if (cfg.subcommand == "dispersion") res = cmd_dispersion(cfg);
        else if (cfg.subcommand == "evolve") res = cmd_evolve(cfg);
        else if (cfg.subcommand == "walk") res = cmd_walk(cfg);
        else if (cfg.subcommand == "units") res = cmd_units(cfg);
        else error = "unknown subcommand " + cfg.subcommand;
    } catch (const std::exception& e) {
        error = e.what();
    }

    const bool passed = error.empty() && res.checks.all_passed();
    manifest["status"] = !error.empty() ? "error" : (passed ? "pass" : "fail");
    if (!error.empty()) manifest["error"] = error;
    manifest["result"] = res.result;
    manifest["report"] = to_json(res.checks);
    Json files = Json::array();
    for (const auto& t : res.tables) files.push_back(t.name);
    manifest["tables"] = files;

    const std::filesystem::path dir(cfg.output_dir);
    try {
        for (const auto& t : res.tables) io::write_file(dir / t.name, t.content);
        io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::write_file(dir / "timing.json", Json{{"subcommand", cfg.subcommand}, {"wall_seconds", secs}}.dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }

    for (const auto& c : res.checks.checks) {
        if (!c.passed()) {
            log << "FAIL " << c.module << "." << c.name << ": " << io::format_double(c.value) << " "
                << to_string(c.relation) << " " << io::format_double(c.tolerance) << "\n";
        }
    }
    if (!error.empty()) log << "error: " << error << "\n";
    log << cfg.subcommand << ": " << manifest["status"].get<std::string>() << " (" << res.checks.checks.size()
        << " checks, " << res.checks.failures() << " failed, " << res.checks.discrepancies.size()
        << " discrepancies) -> " << (dir / "manifest.json").string() << "\n";
    return passed ? 0 : 1;
}

// Full command line: parse, then dispatch. Usage errors return 2.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const ParseOutcome parsed = parse_config(args);
    if (!parsed.ok) {
        (parsed.exit_code == 0 ? out : err) << parsed.message;
        return parsed.exit_code;
    }
    return dispatch(parsed.config, out);
}

}  // namespace diracwalk
