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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbgfluor/inversion.hpp"
#include "pbgfluor/resolvent.hpp"

namespace pbgfluor::cli {

enum class Scenario { nojump, ensemble, montecarlo, scan, oracle, branching };
enum class OutputFormat { csv, jsonl };
enum class Reservoir { band_edge, flat };

/// Optional geometric block: when present the derived band quantities are
/// reported, and with a dipole it also fixes C in gamma units.
struct BandBlock {
    double index = 1.082;
    double radius = 1.0;
    double light_speed = 1.0;
    std::optional<double> dipole;
    double permittivity = 1.0;
    double gamma_physical = 1.0;  // gamma in the geometric frequency unit

    bool operator==(const BandBlock&) const = default;
};

/// Fully resolved run configuration. All frequencies in units of gamma.
struct RunConfig {
    Scenario scenario = Scenario::nojump;

    double gamma = 1.0;
    double laser_coupling = 1.0;
    double pbg_coupling = 0.19245008972987526;  // C^{2/3} = 1/3
    double omega_b = 0.0;
    double edge_offset = 0.0;  // omega_e - omega_b
    double detuning = 0.0;     // omega_L - omega_b
    double omega_c = 0.0;
    Reservoir reservoir = Reservoir::band_edge;
    double gamma_prime = 1.0;  // flat b -> c rate

    inversion::ContourSpec contour{};
    double horizon = 30.0;
    double dt = 0.01;

    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;
    std::size_t photon_bins = 16;

    double scan_min = -3.0;
    double scan_max = 3.0;
    double scan_step = 0.1;
    std::vector<double> scan_couplings{0.5, 3.0};

    std::size_t oracle_modes = 2000;
    double oracle_band_width = 100.0;  // omega_max - omega_e
    double oracle_horizon = 10.0;

    std::vector<double> branching_rates{0.0, 0.5, 1.0, 2.0};
    std::vector<double> branching_couplings{0.5, 1.0, 3.0};

    std::optional<BandBlock> band;

    std::string output = "-";
    OutputFormat format = OutputFormat::csv;

    SystemParams system() const;
    resolvent::ReservoirKind reservoir_kind() const;

    bool operator==(const RunConfig&) const = default;
};

std::string_view to_string(Scenario s);
std::string_view to_string(OutputFormat f);
Scenario parse_scenario(std::string_view name);
OutputFormat parse_format(std::string_view name);

/// Parses the flat `key = value` grammar: one assignment per line, `#`
/// comments, blank lines and `[section]` headings ignored. Numbers may be
/// written as fractions (`1/3`); lists are comma separated. Unknown keys,
/// duplicates, malformed values and invariant violations throw ConfigError
/// naming the key and line.
RunConfig parse_config(std::string_view text);

/// Throws ConfigError if an invariant is violated.
void validate(const RunConfig& config);

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

/// Recovers the configuration from an output header (`# key = value` lines
/// up to `# end config`).
RunConfig config_from_header(std::string_view output);

}  // namespace pbgfluor::cli
