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

#include "pbgfluor/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "pbgfluor/errors.hpp"
#include "pbgfluor/mode_oracle.hpp"
#include "pbgfluor/montecarlo.hpp"
#include "pbgfluor/renewal.hpp"
#include "pbgfluor/spectral.hpp"
#include "pbgfluor/steadystate.hpp"

namespace pbgfluor::cli {

namespace {

using Value = std::variant<double, std::string, std::vector<double>>;

struct Artifact {
    std::vector<std::pair<std::string, Value>> results;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void result(std::string key, Value v) { results.emplace_back(std::move(key), std::move(v)); }
};

std::string number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, ptr);
}

std::string text_of(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return number(*d);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    std::string out;
    for (double x : std::get<std::vector<double>>(v)) {
        if (!out.empty()) out += ',';
        out += number(x);
    }
    return out;
}

nlohmann::ordered_json json_number(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

nlohmann::ordered_json json_of(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return json_number(*d);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    auto arr = nlohmann::ordered_json::array();
    for (double x : std::get<std::vector<double>>(v)) arr.push_back(json_number(x));
    return arr;
}

std::string render(const RunConfig& config, const Artifact& a) {
    std::ostringstream out;
    // The destination is not part of the result: bytes must not depend on it.
    RunConfig embedded = config;
    embedded.output = "-";
    const std::string canonical = format_config(embedded);
    if (config.format == OutputFormat::csv) {
        out << "# pbgfluor simulate " << to_string(config.scenario) << '\n';
        out << "# master_seed " << config.seed << '\n';
        out << "# begin config\n";
        std::istringstream lines(canonical);
        for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
        out << "# end config\n";
        for (const auto& [key, value] : a.results) out << "# result " << key << " = " << text_of(value) << '\n';
        for (std::size_t i = 0; i < a.columns.size(); ++i) out << (i ? "," : "") << a.columns[i];
        out << '\n';
        for (const auto& row : a.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
            out << '\n';
        }
        return out.str();
    }
    nlohmann::ordered_json header;
    header["type"] = "header";
    header["program"] = "pbgfluor simulate";
    header["scenario"] = std::string(to_string(config.scenario));
    header["master_seed"] = config.seed;
    header["config"] = canonical;
    auto results = nlohmann::ordered_json::object();
    for (const auto& [key, value] : a.results) results[key] = json_of(value);
    header["results"] = results;
    header["columns"] = a.columns;
    out << header.dump() << '\n';
    for (const auto& row : a.rows) {
        nlohmann::ordered_json record;
        for (std::size_t i = 0; i < row.size(); ++i) record[a.columns[i]] = json_number(row[i]);
        out << record.dump() << '\n';
    }
    return out.str();
}

double sup_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

void band_results(const RunConfig& config, Artifact& a) {
    if (!config.band) return;
    const auto& b = *config.band;
    const spectral::BandModel model(b.radius, b.index, b.light_speed);
    const auto edge = spectral::band_edge_params(model);
    a.result("band_gap_center", model.gap_center());
    a.result("band_gap_width_ratio", model.gap_width() / model.gap_center());
    a.result("band_edge_ratio", model.upper_edge() / model.gap_center());
    a.result("band_curvature", edge.curvature);
    a.result("band_k0", edge.k0);
    if (b.dipole) a.result("band_C_physical", spectral::effective_coupling({*b.dipole, b.permittivity}, model));
}

inversion::NoJumpSolution nojump_of(const RunConfig& config, double horizon) {
    return inversion::nojump_populations(config.system(), config.reservoir_kind(), config.contour, horizon,
                                         config.dt);
}

double expected_p_inf(const RunConfig& config) {
    if (config.reservoir == Reservoir::flat) return config.gamma_prime / (config.gamma + config.gamma_prime);
    return steadystate::p_infinity_mode_integral(config.system(), config.reservoir_kind());
}

Artifact nojump_scenario(const RunConfig& config) {
    Artifact a;
    const auto s = nojump_of(config, config.horizon);
    a.result("P_T", s.norm.back());
    a.result("pi0_a_T", s.pi_a.back());
    a.result("pi0_b_T", s.pi_b.back());
    a.result("P_inf_mode_integral", expected_p_inf(config));
    a.columns = {"t", "pi0_a", "pi0_b", "pi0_c", "P"};
    for (std::size_t j = 0; j < s.size(); ++j) a.rows.push_back({s.t[j], s.pi_a[j], s.pi_b[j], s.pi_c[j], s.norm[j]});
    return a;
}

Artifact ensemble_scenario(const RunConfig& config) {
    Artifact a;
    const auto s = nojump_of(config, config.horizon);
    const auto r = renewal::solve_renewal(s, config.gamma);
    const auto f = renewal::renewal_transform_check(s, config.gamma);
    a.result("renewal_residual", renewal::renewal_residual(r, s, config.gamma));
    a.result("transform_max_deviation",
             std::max({sup_abs_diff(r.pi_a, f.pi_a), sup_abs_diff(r.pi_b, f.pi_b), sup_abs_diff(r.pi_c, f.pi_c)}));
    a.result("pi_c_T", r.pi_c.back());
    a.columns = {"t", "pi_a", "pi_b", "pi_c", "pi_a_transform", "pi_b_transform", "pi_c_transform"};
    for (std::size_t j = 0; j < r.t.size(); ++j)
        a.rows.push_back({r.t[j], r.pi_a[j], r.pi_b[j], r.pi_c[j], f.pi_a[j], f.pi_b[j], f.pi_c[j]});
    return a;
}

Artifact montecarlo_scenario(const RunConfig& config) {
    Artifact a;
    const auto s = nojump_of(config, config.horizon);
    const auto r = renewal::solve_renewal(s, config.gamma);
    const auto stats = montecarlo::ensemble_average(config.n_traj, config.seed, s, config.horizon);

    // Photon counting runs each trajectory to trapping, not to the horizon.
    const montecarlo::DelaySampler sampler(s);
    const auto records =
        montecarlo::run_ensemble(config.n_traj, config.seed, sampler, std::numeric_limits<double>::infinity());
    const auto photons = montecarlo::photon_statistics(records, sampler.p_inf(), config.photon_bins);

    const std::vector<double>* mean[3] = {&stats.mean_a, &stats.mean_b, &stats.mean_c};
    const std::vector<double>* err[3] = {&stats.stderr_a, &stats.stderr_b, &stats.stderr_c};
    const std::vector<double>* ren[3] = {&r.pi_a, &r.pi_b, &r.pi_c};
    const char* names[3] = {"a", "b", "c"};
    for (int c = 0; c < 3; ++c) {
        std::size_t inside = 0;
        for (std::size_t j = 0; j < stats.t.size(); ++j)
            if (std::abs((*mean[c])[j] - (*ren[c])[j]) <= 3.0 * (*err[c])[j] + 1e-12) ++inside;
        a.result(std::string("within_3se_fraction_") + names[c], double(inside) / double(stats.t.size()));
    }
    a.result("n_traj", double(stats.n_traj));
    a.result("trapped_before_horizon", double(stats.trapped));
    a.result("P_inf", photons.p_inf);
    a.result("photon_mean", photons.mean);
    a.result("photon_mean_stderr", photons.mean_stderr);
    a.result("photon_mean_expected", photons.expected_mean);
    a.result("photon_chi_square", photons.chi_square);
    a.result("photon_chi_square_dof", double(photons.degrees_of_freedom));
    a.result("photon_chi_square_p_value", photons.p_value);
    std::vector<double> histogram(photons.histogram.begin(), photons.histogram.end());
    a.result("photon_histogram", histogram);
    a.result("photon_geometric", photons.geometric);
    if (!photons.warning.empty()) a.result("photon_warning", photons.warning);

    a.columns = {"t",        "mean_a",   "mean_b",   "mean_c",    "stderr_a",
                 "stderr_b", "stderr_c", "renewal_a", "renewal_b", "renewal_c"};
    for (std::size_t j = 0; j < stats.t.size(); ++j)
        a.rows.push_back({stats.t[j], stats.mean_a[j], stats.mean_b[j], stats.mean_c[j], stats.stderr_a[j],
                          stats.stderr_b[j], stats.stderr_c[j], r.pi_a[j], r.pi_b[j], r.pi_c[j]});
    return a;
}

Artifact scan_scenario(const RunConfig& config) {
    if (config.reservoir != Reservoir::band_edge) throw ConfigError("scan: requires reservoir = band_edge");
    Artifact a;
    std::vector<double> detunings;
    const auto steps = static_cast<std::size_t>(std::floor((config.scan_max - config.scan_min) / config.scan_step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) detunings.push_back(config.scan_min + double(i) * config.scan_step);
    const auto scans = steadystate::detuning_scan(config.system(), detunings, config.scan_couplings);
    a.columns = {"V_ab", "delta", "P_inf", "mean_photons"};
    for (const auto& scan : scans) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& pt : scan.points) {
            lo = std::min(lo, pt.p_inf);
            hi = std::max(hi, pt.p_inf);
            a.rows.push_back({scan.laser_coupling, pt.detuning, pt.p_inf, pt.mean_photons});
        }
        const std::string tag = "V_ab=" + number(scan.laser_coupling);
        a.result("max_step[" + tag + "]", steadystate::max_step(scan));
        a.result("max_min_ratio[" + tag + "]", lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    return a;
}

Artifact oracle_scenario(const RunConfig& config) {
    if (config.reservoir != Reservoir::band_edge) throw ConfigError("oracle: requires reservoir = band_edge");
    Artifact a;
    const auto p = config.system();
    const auto inv = nojump_of(config, config.oracle_horizon);
    oracle::ModeOracleOptions options;
    options.modes = config.oracle_modes;
    options.omega_max = p.omega_e + config.oracle_band_width;
    const auto ode = oracle::discretized_modes_oracle(p, options, config.oracle_horizon, config.dt);
    if (ode.size() != inv.size()) throw NumericalError("oracle: time grids differ between methods");
    a.result("sup_norm_pi_b", sup_abs_diff(inv.pi_b, ode.pi_b));
    a.result("sup_norm_pi_a", sup_abs_diff(inv.pi_a, ode.pi_a));
    a.result("modes", double(options.modes));
    a.columns = {"t", "pi0_a_inversion", "pi0_a_oracle", "pi0_b_inversion", "pi0_b_oracle", "abs_diff_b"};
    for (std::size_t j = 0; j < inv.size(); ++j)
        a.rows.push_back(
            {inv.t[j], inv.pi_a[j], ode.pi_a[j], inv.pi_b[j], ode.pi_b[j], std::abs(inv.pi_b[j] - ode.pi_b[j])});
    return a;
}

Artifact branching_scenario(const RunConfig& config) {
    Artifact a;
    const auto p = config.system();
    a.columns = {"gamma_prime", "V_ab", "P_inf", "expected", "abs_error"};
    double worst = 0.0;
    for (double rate : config.branching_rates) {
        if (config.gamma + rate <= 0.0) throw ConfigError("branching: gamma + gamma_prime must be > 0");
        const double expected = rate / (config.gamma + rate);
        for (double v : config.branching_couplings) {
            const double value = steadystate::free_space_branching(config.gamma, rate, v, p.omega_L, p.omega_b,
                                                                   config.horizon, config.contour, config.dt);
            worst = std::max(worst, std::abs(value - expected));
            a.rows.push_back({rate, v, value, expected, std::abs(value - expected)});
        }
    }
    a.result("max_abs_error", worst);
    return a;
}

}  // namespace

std::string render_scenario(const RunConfig& config) {
    validate(config);
    Artifact a;
    switch (config.scenario) {
        case Scenario::nojump: a = nojump_scenario(config); break;
        case Scenario::ensemble: a = ensemble_scenario(config); break;
        case Scenario::montecarlo: a = montecarlo_scenario(config); break;
        case Scenario::scan: a = scan_scenario(config); break;
        case Scenario::oracle: a = oracle_scenario(config); break;
        case Scenario::branching: a = branching_scenario(config); break;
    }
    band_results(config, a);
    return render(config, a);
}

int exit_status_for_current_exception() noexcept {
    try {
        throw;
    } catch (const ConfigError&) {
        return exit_config_error;
    } catch (const DomainError&) {
        return exit_config_error;
    } catch (const NumericalError&) {
        return exit_numerical_error;
    } catch (...) {
        return exit_internal_error;
    }
}

int run_scenario(const RunConfig& config, std::ostream& err) {
    const std::string name(to_string(config.scenario));
    try {
        const std::string text = render_scenario(config);
        if (config.output == "-") {
            std::cout << text << std::flush;
        } else {
            std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
            if (!file) throw ConfigError("cannot open output file '" + config.output + "'");
            file << text;
            if (!file.flush()) throw ConfigError("failed writing output file '" + config.output + "'");
        }
        return exit_ok;
    } catch (const std::exception& e) {
        err << "simulate " << name << ": " << e.what() << '\n';
        return exit_status_for_current_exception();
    }
}

}  // namespace pbgfluor::cli
