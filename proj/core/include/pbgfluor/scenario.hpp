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

#include <ostream>
#include <string>

#include "pbgfluor/config.hpp"

namespace pbgfluor::cli {

/// Exit statuses of the simulate tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;
inline constexpr int exit_internal_error = 1;

/// Runs the configured scenario and returns the complete artifact text
/// (header block followed by the data table). The embedded config omits the
/// output path, so the text is independent of where it is written. Throws
/// the module errors.
///
/// Column layouts (csv; jsonl carries the same keys per row):
///   nojump      t,pi0_a,pi0_b,pi0_c,P
///   ensemble    t,pi_a,pi_b,pi_c,pi_a_transform,pi_b_transform,pi_c_transform
///   montecarlo  t,mean_a,mean_b,mean_c,stderr_a,stderr_b,stderr_c,renewal_a,renewal_b,renewal_c
///   scan        V_ab,delta,P_inf,mean_photons
///   oracle      t,pi0_a_inversion,pi0_a_oracle,pi0_b_inversion,pi0_b_oracle,abs_diff_b
///   branching   gamma_prime,V_ab,P_inf,expected,abs_error
std::string render_scenario(const RunConfig& config);

/// Renders and writes to config.output ("-" is stdout). Errors are reported
/// on `err` with the scenario name and mapped to an exit status.
int run_scenario(const RunConfig& config, std::ostream& err);

/// Maps the currently handled exception to an exit status; call only from
/// inside a catch block.
int exit_status_for_current_exception() noexcept;

}  // namespace pbgfluor::cli
