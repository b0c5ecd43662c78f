#include "fslab/sampling.hpp"

#include <cmath>
#include <numbers>

#include "fslab/errors.hpp"
#include "fslab/random.hpp"
#include "fslab/regions.hpp"

namespace fslab {

double max_admissible_angle(double rho, const SectorSpec& spec, const FluidParams& params) {
    const double pi = std::numbers::pi;
    switch (spec.zetaCase) {
        case ZetaCase::C1:
            return pi - spec.epsilon;
        case ZetaCase::C2: {
            if (params.zeta.imag() == 0.0) throw DegenerateCaseError("case C2 needs Im zeta != 0");
            const double slope = std::abs(params.zeta.real() / params.zeta.imag());
            const double cone = std::atan2(1.0, slope);
            const double half = std::acos(std::min(1.0, spec.lambda0 / rho));
            return std::min(cone, half);
        }
        case ZetaCase::C3:
            return std::acos(std::min(1.0, spec.lambda0 / rho));
    }
    return 0.0;
}

bool map_sample(const SampleCoords& c, const SamplingPlan& plan, const SectorSpec& spec,
                const FluidParams& params, SpectralPoint& out) {
    const double base = spec.lambda0 > 0 ? spec.lambda0 : 1.0;
    const double lo = std::log(base * plan.lambdaMinFactor);
    const double hi = std::log(base * plan.lambdaMaxFactor);
    const double rho = std::exp(lo + (hi - lo) * c.u[0]);
    const double theta = (2.0 * c.u[1] - 1.0) * max_admissible_angle(rho, spec, params);
    out.lambda = std::polar(rho, theta);
    const double xlo = std::log(plan.xiMin);
    const double xhi = std::log(plan.xiMax);
    const double r = std::exp(xlo + (xhi - xlo) * c.u[2]);
    out.dim = plan.dim;
    if (plan.dim == 1) {
        out.xi = {r, 0.0};
    } else {
        const double phi = 2.0 * std::numbers::pi * c.u[3];
        out.xi = {r * std::cos(phi), r * std::sin(phi)};
    }
    if (spec.zetaCase == ZetaCase::C1) return in_lambda_region(out.lambda, spec);
    return true;
}

SampleCoords sample_coords(const SamplingPlan& plan, const SectorSpec& spec, const FluidParams& params,
                           std::size_t index, double* extra) {
    auto g = make_rng(plan.seed, plan.stream, index);
    SpectralPoint pt;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        SampleCoords c{{uniform01(g), uniform01(g), uniform01(g), uniform01(g)}};
        const double e = uniform01(g);
        if (map_sample(c, plan, spec, params, pt)) {
            if (extra) *extra = e;
            return c;
        }
    }
    throw RegionError("sampling plan could not place a point inside the region");
}

SpectralPoint sample_point(const SamplingPlan& plan, const SectorSpec& spec, const FluidParams& params,
                           std::size_t index, double* extra) {
    SpectralPoint pt;
    map_sample(sample_coords(plan, spec, params, index, extra), plan, spec, params, pt);
    return pt;
}

}  // namespace fslab
