// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <armadillo>
#include <vector>

#include "holosurf/coupling.hpp"
#include "holosurf/geometry.hpp"
#include "holosurf/radiation.hpp"

namespace holosurf {

// h_n = sqrt(R(u0)) * exp(+j 2 pi u0 . t_n); row vector, one entry per element.
struct SteeringVector {
    arma::cx_rowvec entries;
    double theta = 0.0, phi = 0.0;  // target angles, radians
    double element_gain = 1.0;      // R(u0)
};

SteeringVector steering_vector(const ArrayGeometry& geom, const RadiationPattern& pattern,
                               const Direction& target);

enum class BeamformerKind { Conventional, Optimal };

struct BeamformingVector {
    arma::cx_vec entries;  // column vector, |f|^2 sums to total_power
    double total_power = 1.0;
    BeamformerKind kind = BeamformerKind::Conventional;
};

// Matched filter on the steering vector; ignores coupling.
BeamformingVector conventional_beamformer(const SteeringVector& h, double total_power = 1.0);

// Matched filter on the coupled channel h * A: f = A h^H, normalized.
BeamformingVector optimal_beamformer(const SteeringVector& h, const TransferMatrix& a,
                                     double total_power = 1.0);

struct GainResult {
    double linear = 0.0;  // |h A f|^2 / |f|^2
    double db = 0.0;
    double theta = 0.0, phi = 0.0;  // direction the steering vector points at
    BeamformerKind kind = BeamformerKind::Conventional;
};

GainResult gain(const SteeringVector& h, const TransferMatrix& a, const BeamformingVector& f);

// Radiated power density of the excited surface in an arbitrary direction
// (same quantity gain() evaluates at the design target).
double surface_pattern(const ArrayGeometry& geom, const RadiationPattern& pattern,
                       const TransferMatrix& a, const BeamformingVector& f,
                       const Direction& observe);

// Closed-form gains of a two-element isotropic array on the z axis with
// spacing d (wavelengths), steered to polar angle theta. Unit total power.
struct TwoElementGains {
    double conventional = 0.0;
    double optimal = 0.0;
    arma::cx_vec f_conventional;
    arma::cx_vec f_optimal;
};

TwoElementGains two_element_closed_form(double spacing, double theta);

// Sampled 1-D cut through a radiated pattern, in dB, on a uniform angle grid.
// periodic marks cuts that wrap around (full 360 degree sweeps).
struct PatternCut {
    std::vector<double> angle_deg;
    std::vector<double> level_db;
    bool periodic = false;
};

struct BeamwidthResult {
    double width_deg = 0.0;  // NaN when incomplete
    bool complete = false;
    bool left_found = false, right_found = false;
    double left_deg = 0.0, right_deg = 0.0;  // bounding minima, cut coordinates
    double peak_db = 0.0;
};

// Width of the main lobe around target_deg, measured between the nearest
// local minima at least 30 dB below the peak on each side.
BeamwidthResult zero_point_beamwidth(const PatternCut& cut, double target_deg);

}  // namespace holosurf
