#pragma once

#include <cstddef>
#include <cstdint>

#include "fslab/params.hpp"

namespace fslab {

// Deterministic sampling of spectral points in a resolvent region.
// |lambda| is log-uniform in [lambda0 * lambdaMinFactor, lambda0 * lambdaMaxFactor],
// the angle uniform over the admissible range at that modulus, |xi'| log-uniform
// in [xiMin, xiMax] with a uniform direction when dim = 2.
struct SamplingPlan {
    std::size_t count = 10000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    double lambdaMinFactor = 1.0;
    double lambdaMaxFactor = 1e4;
    double xiMin = 1e-3;
    double xiMax = 1e3;
    int dim = 1;
};

struct SampleCoords {
    double u[4];  // uniform draws: modulus, angle, |xi'|, direction / normal coordinate
};

// Largest |arg lambda| admissible at |lambda| = rho (before the disk test of case C1).
double max_admissible_angle(double rho, const SectorSpec& spec, const FluidParams& params);

// Maps uniform coordinates to a point of the region; returns false if the point
// falls into the excluded disk of case C1.
bool map_sample(const SampleCoords& c, const SamplingPlan& plan, const SectorSpec& spec,
                const FluidParams& params, SpectralPoint& out);

// Uniform coordinates of sample `index` (after rejection) and its extra draw.
SampleCoords sample_coords(const SamplingPlan& plan, const SectorSpec& spec, const FluidParams& params,
                           std::size_t index, double* extra = nullptr);

// Sample `index` of the plan; rejection draws stay inside the index's substream.
SpectralPoint sample_point(const SamplingPlan& plan, const SectorSpec& spec, const FluidParams& params,
                           std::size_t index, double* extra = nullptr);

}  // namespace fslab
