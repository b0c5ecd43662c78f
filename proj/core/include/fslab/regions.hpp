#pragma once

#include "fslab/params.hpp"

namespace fslab {

// Absolute tolerance for boundary membership; region boundaries count as inside.
inline constexpr double kRegionTol = 1e-12;

// Sector of half-opening pi - epsilon, minus the disk |lambda| < lambda0.
bool in_sigma(cplx lambda, double epsilon, double lambda0);

// Sector region with the disk around -(rho3/nu + epsilon) removed.
bool in_lambda_region(cplx lambda, const SectorSpec& spec);

// Checks that params.zeta matches the declared case (C1 ignores params.zeta).
void check_zeta_case(const FluidParams& params, const SectorSpec& spec);

bool in_gamma_region(cplx lambda, const SectorSpec& spec, const FluidParams& params);

struct SectorInequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// |a lambda + |xi|^2| against sin(epsilon/2) (a |lambda| + |xi|^2).
SectorInequalityReport sector_inequality_check(const SpectralPoint& sample, double a, double epsilon);

}  // namespace fslab
