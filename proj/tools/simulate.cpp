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

// simulate <scenario> --config <file> [--seed S] [--out PATH] [--format csv|jsonl]
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "pbgfluor/config.hpp"
#include "pbgfluor/errors.hpp"
#include "pbgfluor/scenario.hpp"

namespace cli = pbgfluor::cli;

int main(int argc, char** argv) {
    CLI::App app{"Driven Lambda-atom near a photonic band edge: scenario runner"};
    std::string scenario, config_path, out, format;
    std::uint64_t seed = 0;
    app.add_option("scenario", scenario, "nojump | ensemble | montecarlo | scan | oracle | branching")->required();
    app.add_option("--config", config_path, "key = value configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
    auto* out_opt = app.add_option("--out", out, "output path, '-' for stdout (overrides the config)");
    auto* format_opt = app.add_option("--format", format, "csv or jsonl (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config_error;
    }

    try {
        std::ifstream file(config_path, std::ios::binary);
        if (!file) throw pbgfluor::ConfigError("cannot read config file '" + config_path + "'");
        std::ostringstream text;
        text << file.rdbuf();
        auto config = cli::parse_config(text.str());
        config.scenario = cli::parse_scenario(scenario);
        if (*seed_opt) config.seed = seed;
        if (*out_opt) config.output = out;
        if (*format_opt) config.format = cli::parse_format(format);
        cli::validate(config);
        return cli::run_scenario(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << '\n';
        return cli::exit_status_for_current_exception();
    }
}
