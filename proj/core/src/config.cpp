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

#include "pbgfluor/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pbgfluor/errors.hpp"
#include "pbgfluor/spectral.hpp"

namespace pbgfluor::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, std::string_view key, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line << ": " << key << ": " << what;
    throw ConfigError(msg.str());
}

std::optional<double> to_double(std::string_view text) {
    text = trim(text);
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = to_double(text.substr(0, slash));
        const auto den = to_double(text.substr(slash + 1));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

std::optional<std::uint64_t> to_unsigned(std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

std::optional<bool> to_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> to_list(std::string_view text) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = to_double(text.substr(0, comma));
        if (!item) return std::nullopt;
        out.push_back(*item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string number(double x) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, ptr);
}

std::string number_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += number(xs[i]);
    }
    return out;
}

struct Parser {
    RunConfig config;
    std::optional<double> c_direct, c_pow23;
    BandBlock band;
    bool band_seen = false;
    std::size_t line = 0;
    std::string_view key;
    std::string_view value;

    double real() const {
        const auto v = to_double(value);
        if (!v || !std::isfinite(*v)) fail(line, key, "expected a finite number, got '" + std::string(value) + "'");
        return *v;
    }
    std::uint64_t count() const {
        const auto v = to_unsigned(value);
        if (!v) fail(line, key, "expected a non-negative integer, got '" + std::string(value) + "'");
        return *v;
    }
    bool flag() const {
        const auto v = to_bool(value);
        if (!v) fail(line, key, "expected true or false, got '" + std::string(value) + "'");
        return *v;
    }
    std::vector<double> list() const {
        const auto v = to_list(value);
        if (!v) fail(line, key, "expected a comma-separated list of numbers");
        return *v;
    }
};

using Setter = std::function<void(Parser&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"scenario",
         [](Parser& p) {
             try {
                 p.config.scenario = parse_scenario(p.value);
             } catch (const ConfigError& e) {
                 fail(p.line, p.key, e.what());
             }
         }},
        {"gamma", [](Parser& p) { p.config.gamma = p.real(); }},
        {"V_ab", [](Parser& p) { p.config.laser_coupling = p.real(); }},
        {"C", [](Parser& p) { p.c_direct = p.real(); }},
        {"C_pow23", [](Parser& p) { p.c_pow23 = p.real(); }},
        {"omega_b", [](Parser& p) { p.config.omega_b = p.real(); }},
        {"omega_e_minus_omega_b", [](Parser& p) { p.config.edge_offset = p.real(); }},
        {"detuning", [](Parser& p) { p.config.detuning = p.real(); }},
        {"omega_c", [](Parser& p) { p.config.omega_c = p.real(); }},
        {"reservoir",
         [](Parser& p) {
             if (p.value == "band_edge") p.config.reservoir = Reservoir::band_edge;
             else if (p.value == "flat") p.config.reservoir = Reservoir::flat;
             else fail(p.line, p.key, "expected band_edge or flat");
         }},
        {"gamma_prime", [](Parser& p) { p.config.gamma_prime = p.real(); }},
        {"window_halfwidth", [](Parser& p) { p.config.contour.window_halfwidth = p.real(); }},
        {"contour_offset", [](Parser& p) { p.config.contour.offset = p.real(); }},
        {"grid_points", [](Parser& p) { p.config.contour.grid_points = p.count(); }},
        {"edge_refinement", [](Parser& p) { p.config.contour.edge_refinement = p.count(); }},
        {"asymptote_subtraction", [](Parser& p) { p.config.contour.asymptote_subtraction = p.flag(); }},
        {"core_halfwidth", [](Parser& p) { p.config.contour.core_halfwidth = p.real(); }},
        {"refine_tolerance", [](Parser& p) { p.config.contour.refine_tolerance = p.real(); }},
        {"horizon", [](Parser& p) { p.config.horizon = p.real(); }},
        {"dt", [](Parser& p) { p.config.dt = p.real(); }},
        {"n_traj", [](Parser& p) { p.config.n_traj = p.count(); }},
        {"seed", [](Parser& p) { p.config.seed = p.count(); }},
        {"photon_bins", [](Parser& p) { p.config.photon_bins = p.count(); }},
        {"scan_delta_min", [](Parser& p) { p.config.scan_min = p.real(); }},
        {"scan_delta_max", [](Parser& p) { p.config.scan_max = p.real(); }},
        {"scan_delta_step", [](Parser& p) { p.config.scan_step = p.real(); }},
        {"scan_V_ab", [](Parser& p) { p.config.scan_couplings = p.list(); }},
        {"oracle_modes", [](Parser& p) { p.config.oracle_modes = p.count(); }},
        {"oracle_band_width", [](Parser& p) { p.config.oracle_band_width = p.real(); }},
        {"oracle_horizon", [](Parser& p) { p.config.oracle_horizon = p.real(); }},
        {"branching_gamma_prime", [](Parser& p) { p.config.branching_rates = p.list(); }},
        {"branching_V_ab", [](Parser& p) { p.config.branching_couplings = p.list(); }},
        {"band_n", [](Parser& p) { p.band.index = p.real(); p.band_seen = true; }},
        {"band_a", [](Parser& p) { p.band.radius = p.real(); p.band_seen = true; }},
        {"band_c", [](Parser& p) { p.band.light_speed = p.real(); p.band_seen = true; }},
        {"band_dipole", [](Parser& p) { p.band.dipole = p.real(); p.band_seen = true; }},
        {"band_epsilon0", [](Parser& p) { p.band.permittivity = p.real(); p.band_seen = true; }},
        {"band_gamma", [](Parser& p) { p.band.gamma_physical = p.real(); p.band_seen = true; }},
        {"output", [](Parser& p) { p.config.output = std::string(p.value); }},
        {"format",
         [](Parser& p) {
             try {
                 p.config.format = parse_format(p.value);
             } catch (const ConfigError& e) {
                 fail(p.line, p.key, e.what());
             }
         }},
    };
    return table;
}

void check(bool ok, std::string_view key, const char* what) {
    if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

}  // namespace

SystemParams RunConfig::system() const {
    SystemParams p;
    p.gamma = gamma;
    p.laser_coupling = laser_coupling;
    p.pbg_coupling = reservoir == Reservoir::band_edge ? pbg_coupling : 0.0;
    p.omega_b = omega_b;
    p.omega_e = omega_b + edge_offset;
    p.omega_L = omega_b + detuning;
    p.omega_c = omega_c;
    return p;
}

resolvent::ReservoirKind RunConfig::reservoir_kind() const {
    if (reservoir == Reservoir::flat) return resolvent::Flat{gamma_prime};
    return resolvent::BandEdge{pbg_coupling, omega_b + edge_offset};
}

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::nojump: return "nojump";
        case Scenario::ensemble: return "ensemble";
        case Scenario::montecarlo: return "montecarlo";
        case Scenario::scan: return "scan";
        case Scenario::oracle: return "oracle";
        case Scenario::branching: return "branching";
    }
    return "nojump";
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "jsonl"; }

Scenario parse_scenario(std::string_view name) {
    for (auto s : {Scenario::nojump, Scenario::ensemble, Scenario::montecarlo, Scenario::scan, Scenario::oracle,
                   Scenario::branching})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "' (expected nojump, ensemble, montecarlo, scan, oracle or branching)");
}

OutputFormat parse_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "jsonl") return OutputFormat::jsonl;
    throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or jsonl)");
}

RunConfig parse_config(std::string_view text) {
    Parser parser;
    std::set<std::string, std::less<>> seen;
    std::map<std::string, std::size_t, std::less<>> line_of;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view raw = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, line, "malformed section heading");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, line, "expected 'key = value'");
        parser.key = trim(line.substr(0, eq));
        parser.value = trim(line.substr(eq + 1));
        parser.line = line_no;
        const auto it = setters().find(parser.key);
        if (it == setters().end()) fail(line_no, parser.key, "unknown key");
        if (!seen.insert(std::string(parser.key)).second) fail(line_no, parser.key, "duplicate key");
        line_of[std::string(parser.key)] = line_no;
        it->second(parser);
    }

    RunConfig& config = parser.config;
    const int sources = int(parser.c_direct.has_value()) + int(parser.c_pow23.has_value()) +
                        int(parser.band_seen && parser.band.dipole.has_value());
    if (sources > 1) throw ConfigError("C: give only one of C, C_pow23 or band_dipole");
    if (parser.c_direct) {
        if (*parser.c_direct < 0.0) fail(line_of["C"], "C", "must be >= 0");
        config.pbg_coupling = *parser.c_direct;
    }
    if (parser.c_pow23) {
        if (*parser.c_pow23 < 0.0) fail(line_of["C_pow23"], "C_pow23", "must be >= 0");
        config.pbg_coupling = spectral::coupling_from_pow23(*parser.c_pow23);
    }
    if (parser.band_seen) {
        config.band = parser.band;
        try {
            const spectral::BandModel model(parser.band.radius, parser.band.index, parser.band.light_speed);
            if (parser.band.dipole) {
                check(parser.band.gamma_physical > 0.0, "band_gamma", "must be > 0");
                const double c_phys =
                    spectral::effective_coupling({*parser.band.dipole, parser.band.permittivity}, model);
                config.pbg_coupling = c_phys / std::pow(parser.band.gamma_physical, 1.5);
            }
        } catch (const DomainError& e) {
            throw ConfigError(std::string("band block: ") + e.what());
        }
    }
    validate(config);
    return config;
}

void validate(const RunConfig& c) {
    check(c.gamma >= 0.0, "gamma", "must be >= 0 (decay rate)");
    check(c.laser_coupling >= 0.0, "V_ab", "must be >= 0 (real laser coupling)");
    check(c.pbg_coupling >= 0.0, "C", "must be >= 0");
    check(c.gamma_prime >= 0.0, "gamma_prime", "must be >= 0");
    check(c.horizon > 0.0, "horizon", "must be > 0");
    check(c.dt > 0.0, "dt", "must be > 0");
    check(c.dt <= c.horizon, "dt", "must not exceed the horizon");
    check(c.n_traj >= 1, "n_traj", "must be >= 1");
    check(c.photon_bins >= 1, "photon_bins", "must be >= 1");
    check(c.contour.window_halfwidth > 0.0, "window_halfwidth", "must be > 0");
    check(c.contour.offset >= 0.0, "contour_offset", "must be >= 0");
    check(c.contour.grid_points >= 2, "grid_points", "must be >= 2");
    check(c.contour.core_halfwidth >= 0.0, "core_halfwidth", "must be >= 0");
    check(c.contour.refine_tolerance >= 0.0, "refine_tolerance", "must be >= 0");
    check(c.scan_step > 0.0, "scan_delta_step", "must be > 0");
    check(c.scan_max >= c.scan_min, "scan_delta_max", "must be >= scan_delta_min");
    for (double v : c.scan_couplings) check(v >= 0.0, "scan_V_ab", "entries must be >= 0");
    check(c.oracle_modes >= 1, "oracle_modes", "must be >= 1");
    check(c.oracle_band_width > 0.0, "oracle_band_width", "must be > 0");
    check(c.oracle_horizon > 0.0, "oracle_horizon", "must be > 0");
    for (double v : c.branching_rates) check(v >= 0.0, "branching_gamma_prime", "entries must be >= 0");
    for (double v : c.branching_couplings) check(v >= 0.0, "branching_V_ab", "entries must be >= 0");
    check(c.output.find('\n') == std::string::npos, "output", "must be a single line");
    if (c.reservoir == Reservoir::band_edge)
        check(c.gamma > 0.0 || c.pbg_coupling > 0.0 || c.scenario == Scenario::nojump ||
                  c.scenario == Scenario::oracle,
              "gamma", "gamma and C cannot both vanish for this scenario (no dissipation channel)");
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    auto put = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    put("scenario", std::string(to_string(c.scenario)));
    put("gamma", number(c.gamma));
    put("V_ab", number(c.laser_coupling));
    if (!(c.band && c.band->dipole)) put("C", number(c.pbg_coupling));
    put("omega_b", number(c.omega_b));
    put("omega_e_minus_omega_b", number(c.edge_offset));
    put("detuning", number(c.detuning));
    put("omega_c", number(c.omega_c));
    put("reservoir", c.reservoir == Reservoir::band_edge ? "band_edge" : "flat");
    put("gamma_prime", number(c.gamma_prime));
    put("window_halfwidth", number(c.contour.window_halfwidth));
    put("contour_offset", number(c.contour.offset));
    put("grid_points", std::to_string(c.contour.grid_points));
    put("edge_refinement", std::to_string(c.contour.edge_refinement));
    put("asymptote_subtraction", c.contour.asymptote_subtraction ? "true" : "false");
    put("core_halfwidth", number(c.contour.core_halfwidth));
    put("refine_tolerance", number(c.contour.refine_tolerance));
    put("horizon", number(c.horizon));
    put("dt", number(c.dt));
    put("n_traj", std::to_string(c.n_traj));
    put("seed", std::to_string(c.seed));
    put("photon_bins", std::to_string(c.photon_bins));
    put("scan_delta_min", number(c.scan_min));
    put("scan_delta_max", number(c.scan_max));
    put("scan_delta_step", number(c.scan_step));
    put("scan_V_ab", number_list(c.scan_couplings));
    put("oracle_modes", std::to_string(c.oracle_modes));
    put("oracle_band_width", number(c.oracle_band_width));
    put("oracle_horizon", number(c.oracle_horizon));
    put("branching_gamma_prime", number_list(c.branching_rates));
    put("branching_V_ab", number_list(c.branching_couplings));
    if (c.band) {
        put("band_n", number(c.band->index));
        put("band_a", number(c.band->radius));
        put("band_c", number(c.band->light_speed));
        if (c.band->dipole) put("band_dipole", number(*c.band->dipole));
        put("band_epsilon0", number(c.band->permittivity));
        put("band_gamma", number(c.band->gamma_physical));
    }
    put("output", c.output);
    put("format", std::string(to_string(c.format)));
    return out.str();
}

RunConfig config_from_header(std::string_view output) {
    if (const auto first = output.find_first_not_of(" \t\r\n");
        first != std::string_view::npos && output[first] == '{') {
        const auto eol = output.find('\n', first);
        const auto header = nlohmann::json::parse(output.substr(first, eol - first), nullptr, false);
        if (header.is_discarded() || !header.contains("config") || !header["config"].is_string())
            throw ConfigError("header: first json line carries no config");
        return parse_config(header["config"].get<std::string>());
    }
    std::string body;
    bool in_config = false;
    while (!output.empty()) {
        const auto eol = output.find('\n');
        const std::string_view line = output.substr(0, eol);
        output.remove_prefix(eol == std::string_view::npos ? output.size() : eol + 1);
        if (line == "# begin config") {
            in_config = true;
            continue;
        }
        if (line == "# end config") return parse_config(body);
        if (in_config) {
            if (line.rfind("# ", 0) != 0) throw ConfigError("header: malformed config line");
            body.append(line.substr(2));
            body.push_back('\n');
        }
    }
    throw ConfigError("header: no '# begin config' ... '# end config' block found");
}

}  // namespace pbgfluor::cli
