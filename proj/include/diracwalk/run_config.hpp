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

#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace diracwalk {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputEnvVar = "DIRACWALK_OUT";
inline constexpr const char* kDefaultOutputDir = "diracwalk_out";

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Tolerances {
    double exact = 1e-12;        // identities that hold to rounding
    double mass = 1e-12;         // per-step mass drift
    double prior = 1e-14;        // sum of prior weights
    double eigenmode = 1e-10;    // sampled eigenmode on the lattice Dirac rows
    double round_trip = 1e-14;   // Gamma^-1 Gamma
    double dispersion = 0.01;    // relative error in the small-argument regime
    double tv = 0.02;            // Monte Carlo total variation
    double order = 1.8;          // minimum observed convergence order
};

struct RunConfig {
    std::string subcommand;
    double mu = 0.1;
    double epsilon = 0.0;
    std::int64_t lambda = 100;
    int nt = 256;
    int nx = 256;
    std::uint64_t seed = 42;

    // Initial condition: delta | packet | random.
    std::string init = "delta";
    int init_state = 1;
    int t0 = -1;  // -1 selects the lattice centre
    int x0 = -1;
    double width = 4.0;

    // k grid for the dispersion map, in units of 1/dx.
    double k_min = -0.5;
    double k_max = 0.5;
    int k_count = 101;

    // Window for the eigen relation; zero extents select the whole lattice.
    int roi_t_begin = 0;
    int roi_t_end = 0;
    int roi_x_begin = 0;
    int roi_x_end = 0;

    std::int64_t walkers = 10000;
    std::size_t stored_trajectories = 1;
    unsigned threads = 1;
    double mass_eV = 510998.95;  // electron

    std::string output_dir;
    std::string config_file;
    Tolerances tol;

    int resolved_t0() const { return t0 < 0 ? nt / 2 : t0; }
    int resolved_x0() const { return x0 < 0 ? nx / 2 : x0; }

    void validate() const {
        auto fail = [](const std::string& m) { throw ConfigError(m); };
        if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0, 1)");
        if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("epsilon must lie in [0, 1)");
        if (lambda < 0) fail("Lambda must be >= 0");
        if (nt < 4 || nx < 4 || nt % 2 != 0 || nx % 2 != 0) fail("nt and nx must be even and >= 4");
        if (init != "delta" && init != "packet" && init != "random") fail("init must be delta, packet or random");
        if (init_state < 1 || init_state > 4) fail("init-state must be 1..4");
        if (t0 >= nt || x0 >= nx || t0 < -1 || x0 < -1) fail("initial site outside the lattice");
        if (!(width > 0.0)) fail("width must be positive");
        if (k_count < 1) fail("k-count must be >= 1");
        if (!(k_min <= k_max)) fail("k-min must not exceed k-max");
        const bool roi_set = roi_t_end != 0 || roi_x_end != 0;
        if (roi_set && (roi_t_begin < 0 || roi_x_begin < 0 || roi_t_end > nt || roi_x_end > nx ||
                        roi_t_begin >= roi_t_end || roi_x_begin >= roi_x_end)) {
            fail("roi window is empty or outside the lattice");
        }
        if (walkers < 1) fail("walkers must be >= 1");
        if (threads < 1) fail("threads must be >= 1");
        if (!(mass_eV > 0.0)) fail("mass-ev must be positive");
        for (double t : {tol.exact, tol.mass, tol.prior, tol.eigenmode, tol.round_trip, tol.dispersion, tol.tv, tol.order}) {
            if (!(t > 0.0)) fail("tolerances must be positive");
        }
        if (output_dir.empty()) fail("output directory must not be empty");
    }
};

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"derive", "validate", "dispersion", "evolve", "walk", "units"};
    return names;
}

// Result of parsing: either a validated config, or an exit code with the
// text to print (help, usage error).
struct ParseOutcome {
    bool ok = false;
    int exit_code = 0;
    std::string message;
    RunConfig config;
};

namespace detail {

inline void add_options(CLI::App& app, RunConfig& c) {
    app.add_option("--mu", c.mu, "Compton fraction, 0 < mu < 1")->capture_default_str();
    app.add_option("--epsilon", c.epsilon, "forward bias in Dirac time, 0 <= epsilon < 1")->capture_default_str();
    app.add_option("--Lambda,--lambda", c.lambda, "ordinal horizon")->capture_default_str();
    app.add_option("--nt", c.nt, "lattice extent in t (even)")->capture_default_str();
    app.add_option("--nx", c.nx, "lattice extent in x (even)")->capture_default_str();
    app.add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    app.add_option("--init", c.init, "initial field: delta, packet or random")->capture_default_str();
    app.add_option("--init-state", c.init_state, "state of the delta / walker start (1..4)")->capture_default_str();
    app.add_option("--t0", c.t0, "initial t index (-1: centre)")->capture_default_str();
    app.add_option("--x0", c.x0, "initial x index (-1: centre)")->capture_default_str();
    app.add_option("--width", c.width, "packet width in lattice units")->capture_default_str();
    app.add_option("--k-min", c.k_min, "dispersion grid start (k dx)")->capture_default_str();
    app.add_option("--k-max", c.k_max, "dispersion grid end (k dx)")->capture_default_str();
    app.add_option("--k-count", c.k_count, "dispersion grid points")->capture_default_str();
    app.add_option("--roi-t-begin", c.roi_t_begin)->capture_default_str();
    app.add_option("--roi-t-end", c.roi_t_end, "0 with roi-x-end 0: whole lattice")->capture_default_str();
    app.add_option("--roi-x-begin", c.roi_x_begin)->capture_default_str();
    app.add_option("--roi-x-end", c.roi_x_end)->capture_default_str();
    app.add_option("--walkers,-n", c.walkers, "Monte Carlo walkers")->capture_default_str();
    app.add_option("--store-trajectories", c.stored_trajectories, "walkers whose full path is kept")
        ->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads for the ensemble")->capture_default_str();
    app.add_option("--mass-ev", c.mass_eV, "particle mass in eV for unit conversion")->capture_default_str();
    app.add_option("--out,-o", c.output_dir, "output directory (default: $DIRACWALK_OUT or ./diracwalk_out)");
    app.add_option("--tol-exact", c.tol.exact)->capture_default_str();
    app.add_option("--tol-mass", c.tol.mass)->capture_default_str();
    app.add_option("--tol-prior", c.tol.prior)->capture_default_str();
    app.add_option("--tol-eigenmode", c.tol.eigenmode)->capture_default_str();
    app.add_option("--tol-round-trip", c.tol.round_trip)->capture_default_str();
    app.add_option("--tol-dispersion", c.tol.dispersion)->capture_default_str();
    app.add_option("--tol-tv", c.tol.tv)->capture_default_str();
    app.add_option("--tol-order", c.tol.order)->capture_default_str();
}

}  // namespace detail

// Parses `args` (without the program name). A flat INI file given with
// --config supplies values; flags on the command line take precedence;
// unknown keys in either place are errors.
inline ParseOutcome parse_config(const std::vector<std::string>& args) {
    ParseOutcome out;
    RunConfig& c = out.config;
    CLI::App app{"Ordinal-time Markov walk on a 1+1D light-cone lattice", "diracwalk"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "flat key = value configuration file")->check(CLI::ExistingFile);
    app.allow_config_extras(CLI::config_extras_mode::error);
    detail::add_options(app, c);
    app.require_subcommand(1, 1);
    const std::vector<std::pair<std::string, std::string>> subs{
        {"derive", "derive the transition matrices and report every constraint"},
        {"validate", "run the invariant suite across all modules"},
        {"dispersion", "lattice vs continuum dispersion map"},
        {"evolve", "deterministic evolution, ordinal average and wavefunction"},
        {"walk", "Monte Carlo ensemble and collapse observer"},
        {"units", "lattice spacings in physical units"},
    };
    for (const auto& [name, help] : subs) {
        app.add_subcommand(name, help)->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out.exit_code = 0;
        out.message = app.help();
        return out;
    } catch (const CLI::CallForVersion&) {
        out.exit_code = 0;
        out.message = std::string(kVersion) + "\n";
        return out;
    } catch (const CLI::ParseError& e) {
        out.exit_code = 2;
        out.message = std::string("error: ") + e.what() + "\n" + "Run with --help for usage.\n";
        return out;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (auto* opt = app.get_config_ptr(); opt && opt->count() > 0) c.config_file = opt->as<std::string>();
    if (c.output_dir.empty()) {
        const char* env = std::getenv(kOutputEnvVar);
        c.output_dir = env && *env ? env : kDefaultOutputDir;
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        out.exit_code = 2;
        out.message = std::string("error: ") + e.what() + "\n";
        return out;
    }
    out.ok = true;
    return out;
}

}  // namespace diracwalk
