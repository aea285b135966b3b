/*
   Copyright 2026 The pbgfluor Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pbgfluor/config.hpp"
#include "pbgfluor/errors.hpp"
#include "pbgfluor/scenario.hpp"

using namespace pbgfluor;
using namespace pbgfluor::cli;

namespace {

RunConfig quick(Scenario s) {
    RunConfig c;
    c.scenario = s;
    c.horizon = 5.0;
    c.dt = 0.05;
    c.n_traj = 200;
    c.contour.grid_points = 2048;
    c.oracle_modes = 200;
    c.oracle_band_width = 25.0;
    c.oracle_horizon = 2.0;
    c.scan_step = 0.5;
    c.branching_rates = {1.0};
    c.branching_couplings = {1.0};
    c.horizon = c.scenario == Scenario::branching ? 40.0 : 5.0;
    return c;
}

std::string column_line(const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') return line;
    return {};
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "pbgfluor_scenario_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

#ifdef PBGFLUOR_SIMULATE
int run_cli(const std::string& args) {
    const std::string cmd = std::string(PBGFLUOR_SIMULATE) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST(Scenario, ColumnsPerScenario) {
    const std::pair<Scenario, const char*> expected[] = {
        {Scenario::nojump, "t,pi0_a,pi0_b,pi0_c,P"},
        {Scenario::ensemble, "t,pi_a,pi_b,pi_c,pi_a_transform,pi_b_transform,pi_c_transform"},
        {Scenario::montecarlo, "t,mean_a,mean_b,mean_c,stderr_a,stderr_b,stderr_c,renewal_a,renewal_b,renewal_c"},
        {Scenario::scan, "V_ab,delta,P_inf,mean_photons"},
        {Scenario::oracle, "t,pi0_a_inversion,pi0_a_oracle,pi0_b_inversion,pi0_b_oracle,abs_diff_b"},
        {Scenario::branching, "gamma_prime,V_ab,P_inf,expected,abs_error"},
    };
    for (const auto& [scenario, columns] : expected)
        EXPECT_EQ(column_line(render_scenario(quick(scenario))), columns) << to_string(scenario);
}

TEST(Scenario, HeaderRoundTripsCsvAndJsonl) {
    for (auto format : {OutputFormat::csv, OutputFormat::jsonl}) {
        auto c = quick(Scenario::montecarlo);
        c.format = format;
        c.seed = 77;
        const std::string text = render_scenario(c);
        EXPECT_EQ(config_from_header(text), c) << to_string(format);
    }
}

TEST(Scenario, ByteDeterministic) {
    const auto c = quick(Scenario::montecarlo);
    EXPECT_EQ(render_scenario(c), render_scenario(c));
    auto other = c;
    other.seed = c.seed + 1;
    EXPECT_NE(render_scenario(c), render_scenario(other));
}

TEST(Scenario, DestinationDoesNotChangeTheBytes) {
    auto a = quick(Scenario::nojump);
    auto b = a;
    a.output = "/tmp/first.csv";
    b.output = "/tmp/second.csv";
    EXPECT_EQ(render_scenario(a), render_scenario(b));
    EXPECT_EQ(config_from_header(render_scenario(a)).output, "-");
}

TEST(Scenario, OracleAtZeroCouplingIsExact) {
    auto c = quick(Scenario::oracle);
    c.pbg_coupling = 0.0;
    c.contour.refine_tolerance = 1e-12;
    const std::string text = render_scenario(c);
    const auto pos = text.find("# result sup_norm_pi_b = ");
    ASSERT_NE(pos, std::string::npos);
    const double sup = std::stod(text.substr(pos + 25));
    EXPECT_LT(sup, 1e-8);
}

TEST(Scenario, FlatReservoirScanIsAConfigError) {
    auto c = quick(Scenario::scan);
    c.reservoir = Reservoir::flat;
    EXPECT_THROW(render_scenario(c), ConfigError);
}

#ifdef PBGFLUOR_SIMULATE
TEST(Cli, ExitStatuses) {
    const auto dir = scratch_dir();
    const auto good = dir / "good.cfg";
    const auto bad = dir / "bad.cfg";
    const auto lossless = dir / "lossless.cfg";
    std::ofstream(good) << "horizon = 2\ndt = 0.05\ngrid_points = 2048\n";
    std::ofstream(bad) << "gamma = -1\n";
    // Undamped dynamics with the contour on the real axis hits the poles.
    std::ofstream(lossless) << "gamma = 0\nC = 0\nhorizon = 2\ndt = 0.05\ngrid_points = 4097\n"
                               "refine_tolerance = 0\n";
    const auto out = dir / "out.csv";
    EXPECT_EQ(run_cli("nojump --config " + good.string() + " --out " + out.string()), 0);
    EXPECT_NE(slurp(out).find("t,pi0_a,pi0_b,pi0_c,P"), std::string::npos);
    EXPECT_EQ(run_cli("nojump --config " + bad.string()), 2);
    EXPECT_EQ(run_cli("nojump --config " + (dir / "missing.cfg").string()), 2);
    EXPECT_EQ(run_cli("bogus --config " + good.string()), 2);
    EXPECT_EQ(run_cli("nojump --config " + good.string() + " --format xml"), 2);
    EXPECT_EQ(run_cli("nojump --config " + lossless.string()), 3);
}

TEST(Cli, SeedAndFormatOverrides) {
    const auto dir = scratch_dir();
    const auto cfg = dir / "mc.cfg";
    std::ofstream(cfg) << "horizon = 3\ndt = 0.05\nn_traj = 100\ngrid_points = 2048\nseed = 5\n";
    const auto out = dir / "mc.jsonl";
    ASSERT_EQ(run_cli("montecarlo --config " + cfg.string() + " --seed 9 --format jsonl --out " + out.string()), 0);
    const auto c = config_from_header(slurp(out));
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.format, OutputFormat::jsonl);
    EXPECT_EQ(c.scenario, Scenario::montecarlo);
}
#endif
