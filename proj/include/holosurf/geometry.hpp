// SPDX-License-Identifier: Apache-2.0
//
// holosurf: mutual-coupling-aware beamforming for dense lossless antenna surfaces

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace holosurf {

// All lengths in this library are expressed in units of the carrier wavelength:
// a position component of 0.25 means 0.25*lambda. The wavelength itself never
// appears as a runtime parameter.

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);

// Propagation direction on the unit sphere; unit norm by construction.
struct UnitVec {
    double x = 0.0, y = 0.0, z = 1.0;

    // Checks |v| = 1 within 1e-12, throws std::domain_error otherwise.
    static UnitVec from_components(double x, double y, double z);
};

double dot(const UnitVec& u, const Vec3& v);

// Polar angle theta in [0, pi], measured from the +z axis; azimuth phi in
// [-pi, pi], measured from +x in the x-y plane.
struct Direction {
    double theta;
    double phi;
    Direction(double theta, double phi);  // throws std::domain_error if out of range
};

UnitVec direction_to_unit(const Direction& dir);

// Unchecked variant for sweeps and perturbed angles; the result is always a
// unit vector even when theta leaves [0, pi].
UnitVec unit_from_angles(double theta, double phi);

enum class Layout { UlaZ, UraYz, Arbitrary };

struct ArrayGeometry {
    std::vector<Vec3> positions;          // element centers, wavelengths
    Layout layout = Layout::Arbitrary;
    std::optional<double> aperture_side;  // URA side length L
    std::optional<double> spacing;        // grid pitch d

    std::size_t size() const { return positions.size(); }
};

// Square grid of L/d x L/d elements in the x = 0 plane, centered on the
// origin, with pitch d. L/d must land on a positive integer. Element order is
// row-major with z descending, then y ascending, so that matrix indices are
// reproducible across runs.
ArrayGeometry build_ura(double aperture_side, double spacing);

// count elements on the z axis with pitch d, centered on the origin,
// ordered by descending z.
ArrayGeometry build_ula(std::size_t count, double spacing);

ArrayGeometry make_arbitrary(std::vector<Vec3> positions);

}  // namespace holosurf
