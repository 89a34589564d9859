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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "diracwalk/commands.hpp"

namespace dw = diracwalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("diracwalk_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int rc = dw::run_cli(args, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return rc;
}

dw::Json manifest(const fs::path& dir) { return dw::Json::parse(dw::io::read_file(dir / "manifest.json")); }

}  // namespace

TEST(Cli, FormatDoubleUsesSeventeenDigits) {
    EXPECT_EQ(dw::io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(dw::io::format_double(1.0), "1");
    EXPECT_EQ(dw::io::format_double(1.0 / 3.0), "0.33333333333333331");
    EXPECT_EQ(dw::io::format_double(-2.5e-300), "-2.5e-300");
}

TEST(Cli, CsvRowsAndErrors) {
    dw::io::Csv csv{"a", "b"};
    csv.cell(1).cell(0.5).end_row();
    EXPECT_EQ(csv.str(), "a,b\n1,0.5\n");
    EXPECT_EQ(csv.rows(), 1u);
    csv.cell(1);
    EXPECT_THROW(csv.end_row(), std::logic_error);
    EXPECT_THROW(dw::io::Csv{"x"}.cell_text("a,b"), std::invalid_argument);
}

TEST(Cli, EmptyTableIsHeaderOnly) {
    EXPECT_EQ(dw::io::observation_csv({}), "t_index,x_observed,lambda_last\n");
    EXPECT_EQ(dw::io::trajectory_csv({}), "lambda,t_index,x_index,state\n");
}

TEST(Cli, TableHeaders) {
    dw::ProbField f(4, 4);
    EXPECT_EQ(first_line(dw::io::prob_field_csv(f)), "t_index,x_index,p1,p2,p3,p4");
    EXPECT_EQ(first_line(dw::io::wave_field_csv(dw::extract(f))), "t_index,x_index,psi1,psi2,psi3,psi4");
    EXPECT_EQ(first_line(dw::io::current_csv(dw::currents(dw::extract(f)))), "t_index,x_index,rho,j");
    EXPECT_EQ(first_line(dw::io::dispersion_csv({})), "k,omega_lattice,omega_einstein,rel_error,in_regime");
    const std::string csv = dw::io::prob_field_csv(f);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
    EXPECT_NE(csv.find("\n3,3,0,0,0,0\n"), std::string::npos);
}

TEST(Cli, WriteFileReportsPath) {
    const fs::path d = scratch("blocked");
    dw::io::write_file(d / "f", "x");
    try {
        dw::io::write_file(d / "f" / "g", "y");
        FAIL() << "expected IoError";
    } catch (const dw::io::IoError& e) {
        EXPECT_NE(std::string(e.what()).find("f"), std::string::npos);
    }
    fs::remove_all(d);
}

TEST(Cli, DefaultsAndPrecedence) {
    auto p = dw::parse_config({"units", "--out", "o"});
    ASSERT_TRUE(p.ok) << p.message;
    EXPECT_EQ(p.config.subcommand, "units");
    EXPECT_DOUBLE_EQ(p.config.mu, 0.1);
    EXPECT_EQ(p.config.seed, 42u);

    const fs::path d = scratch("ini");
    dw::io::write_file(d / "c.ini", "mu = 0.3\nseed = 7\n");
    p = dw::parse_config({"units", "--config", (d / "c.ini").string(), "--mu", "0.5", "--out", "o"});
    ASSERT_TRUE(p.ok) << p.message;
    EXPECT_DOUBLE_EQ(p.config.mu, 0.5);
    EXPECT_EQ(p.config.seed, 7u);
    fs::remove_all(d);
}

TEST(Cli, EnvironmentSuppliesOutputDir) {
    ::setenv(dw::kOutputEnvVar, "from_env", 1);
    auto p = dw::parse_config({"units"});
    EXPECT_EQ(p.config.output_dir, "from_env");
    p = dw::parse_config({"units", "-o", "flag"});
    EXPECT_EQ(p.config.output_dir, "flag");
    ::unsetenv(dw::kOutputEnvVar);
    EXPECT_EQ(dw::parse_config({"units"}).config.output_dir, dw::kDefaultOutputDir);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({}), 2);
    EXPECT_EQ(cli({"units", "--mu", "1.5"}), 2);
    EXPECT_EQ(cli({"units", "--no-such-flag"}), 2);
    EXPECT_EQ(cli({"evolve", "--nt", "7"}), 2);
    EXPECT_EQ(cli({"frobnicate"}), 2);
    const fs::path d = scratch("badini");
    dw::io::write_file(d / "c.ini", "colour = blue\n");
    EXPECT_EQ(cli({"units", "--config", (d / "c.ini").string()}), 2);
    fs::remove_all(d);
}

TEST(Cli, HelpAndVersionExitZero) {
    std::string text;
    EXPECT_EQ(cli({"--help"}, &text), 0);
    EXPECT_NE(text.find("walk"), std::string::npos);
    EXPECT_EQ(cli({"--version"}, &text), 0);
    EXPECT_EQ(text, std::string(dw::kVersion) + "\n");
}

TEST(Cli, UnitsManifest) {
    const fs::path d = scratch("units");
    ASSERT_EQ(cli({"units", "--out", d.string()}), 0);
    const auto m = manifest(d);
    EXPECT_EQ(m["status"], "pass");
    EXPECT_EQ(m["subcommand"], "units");
    EXPECT_EQ(m["conventions"]["heaviside"], "Theta(x) = 1 for x >= 0");
    EXPECT_TRUE(fs::exists(d / "timing.json"));
    fs::remove_all(d);
}

TEST(Cli, DeriveReportsUniqueSolution) {
    const fs::path d = scratch("derive");
    ASSERT_EQ(cli({"derive", "--out", d.string()}), 0);
    const auto m = manifest(d);
    EXPECT_EQ(m["status"], "pass");
    EXPECT_FALSE(m["report"]["discrepancies"].empty());
    fs::remove_all(d);
}

TEST(Cli, EvolveWritesTables) {
    const fs::path d = scratch("evolve");
    ASSERT_EQ(cli({"evolve", "--nt", "32", "--nx", "32", "--Lambda", "10", "--out", d.string()}), 0);
    const auto m = manifest(d);
    EXPECT_EQ(m["status"], "pass");
    for (const auto& t : m["tables"]) EXPECT_TRUE(fs::exists(d / t.get<std::string>())) << t;
    EXPECT_EQ(first_line(dw::io::read_file(d / "psi.csv")), "t_index,x_index,psi1,psi2,psi3,psi4");
    EXPECT_EQ(dw::io::read_file(d / "psi.csv").find('\r'), std::string::npos);
    fs::remove_all(d);
}

TEST(Cli, WalkIsDeterministic) {
    const fs::path a = scratch("walk_a"), b = scratch("walk_b");
    const std::vector<std::string> base{"walk", "-n", "500", "--Lambda", "20", "--nt", "64", "--nx", "64", "--out"};
    auto args = base;
    args.push_back(a.string());
    ASSERT_EQ(cli(args), 0);
    args.back() = b.string();
    ASSERT_EQ(cli(args), 0);
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().filename() == "timing.json") continue;
        EXPECT_EQ(dw::io::read_file(e.path()), dw::io::read_file(b / e.path().filename())) << e.path();
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, FailingCheckExitsOne) {
    const fs::path d = scratch("tight");
    // Tighter than the lattice dispersion can meet.
    EXPECT_EQ(cli({"dispersion", "--tol-dispersion", "1e-12", "--out", d.string()}), 1);
    EXPECT_EQ(manifest(d)["status"], "fail");
    fs::remove_all(d);
}

TEST(Cli, CheckListSemantics) {
    dw::CheckList l;
    l.at_most("m", "a", "op", 0.5, 1.0);
    l.at_least("m", "b", "op", 2.0, 1.8);
    l.holds("m", "c", "op", true);
    EXPECT_TRUE(l.all_passed());
    l.at_most("m", "d", "op", std::nan(""), 1.0);
    EXPECT_FALSE(l.all_passed());
    EXPECT_EQ(l.failures(), 1u);
    EXPECT_EQ(first_line(dw::checks_csv(l)), "module,check,value,relation,tolerance,passed");
}
