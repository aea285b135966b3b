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

namespace pbgfluor::spectral {

enum class Branch { lower, upper };

/// Isotropic dielectric-stack band model. Geometric units are arbitrary but
/// must be consistent; every derived quantity carries the same units.
class BandModel {
public:
    /// Throws DomainError unless a > 0, n >= 1 and c > 0 (all finite).
    BandModel(double scatterer_radius, double refractive_index, double light_speed = 1.0);

    double scatterer_radius() const { return radius_; }
    double refractive_index() const { return index_; }
    double light_speed() const { return light_speed_; }

    /// pi c / (4 n a)
    double gap_center() const;
    /// Separation of the upper-branch minimum and lower-branch maximum; 0 for n == 1.
    double gap_width() const;
    /// gap_center + gap_width / 2
    double upper_edge() const;
    /// pi / (2 a (n + 1)), the wavenumber at which both edges sit.
    double edge_wavenumber() const;

    /// Argument of the arccos in the dispersion relation at wavenumber k.
    double dispersion_argument(double k) const;

private:
    double radius_;
    double index_;
    double light_speed_;
};

/// Photon frequency at wavenumber k on the requested branch. The lower branch
/// is (c/4na) arccos(...); the upper one continues it as (c/4na)(2 pi - arccos(...)).
double dispersion_omega(double k, const BandModel& model, Branch branch);

struct BandEdgeParams {
    double omega_e;    // upper band-edge frequency
    double curvature;  // A in omega ~ omega_e + A (k - k0)^2
    double k0;
};

/// Effective-mass expansion of the upper branch. Requires n > 1; throws
/// DomainError when the curvature denominator vanishes.
BandEdgeParams band_edge_params(const BandModel& model);

/// Microscopic description of the b <-> c dipole.
struct CouplingModel {
    double dipole_moment = 0.0;
    double vacuum_permittivity = 1.0;
};

/// C = d^2 k0^2 omega_e / (4 pi eps0 sqrt(A)), in frequency^{3/2}.
double effective_coupling(const CouplingModel& coupling, const BandModel& band);

/// C from a target value of C^{2/3} (the customary way to quote the coupling strength).
double coupling_from_pow23(double c_pow23);

}  // namespace pbgfluor::spectral
