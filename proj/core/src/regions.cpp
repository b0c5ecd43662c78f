#include "fslab/regions.hpp"

#include <cmath>

#include "fslab/errors.hpp"

namespace fslab {

namespace {

void check_epsilon(double epsilon) {
    if (!(epsilon > 0 && epsilon < std::numbers::pi / 2))
        throw ParameterError("epsilon must lie in (0, pi/2)");
}

}  // namespace

bool in_sigma(cplx lambda, double epsilon, double lambda0) {
    check_epsilon(epsilon);
    if (lambda == cplx(0.0, 0.0)) return false;
    const double arg = std::abs(std::arg(lambda));
    if (arg > std::numbers::pi - epsilon + kRegionTol) return false;
    return std::abs(lambda) >= lambda0 - kRegionTol;
}

bool in_lambda_region(cplx lambda, const SectorSpec& spec) {
    if (!in_sigma(lambda, spec.epsilon, spec.lambda0)) return false;
    const double radius = spec.rho3OverNu + spec.epsilon;
    return std::hypot(lambda.real() + radius, lambda.imag()) >= radius - kRegionTol;
}

void check_zeta_case(const FluidParams& params, const SectorSpec& spec) {
    switch (spec.zetaCase) {
        case ZetaCase::C1:
            return;
        case ZetaCase::C2:
            if (params.zeta.imag() == 0.0)
                throw DegenerateCaseError("case C2 needs Im zeta != 0");
            if (!(params.zeta.real() < 0) || !in_sigma(params.zeta, spec.epsilon, 0.0))
                throw ParameterError("case C2 needs zeta in the sector with Re zeta < 0");
            return;
        case ZetaCase::C3:
            if (params.zeta.real() < 0) throw ParameterError("case C3 needs Re zeta >= 0");
            return;
    }
}

bool in_gamma_region(cplx lambda, const SectorSpec& spec, const FluidParams& params) {
    check_epsilon(spec.epsilon);
    check_zeta_case(params, spec);
    switch (spec.zetaCase) {
        case ZetaCase::C1:
            return in_lambda_region(lambda, spec);
        case ZetaCase::C2: {
            const double slope = std::abs(params.zeta.real() / params.zeta.imag());
            return lambda.real() >= slope * std::abs(lambda.imag()) - kRegionTol &&
                   lambda.real() >= spec.lambda0 - kRegionTol;
        }
        case ZetaCase::C3:
            return lambda.real() >= spec.lambda0 - kRegionTol;
    }
    return false;
}

SectorInequalityReport sector_inequality_check(const SpectralPoint& sample, double a, double epsilon) {
    if (!(a > 0)) throw ParameterError("a must be positive");
    if (!in_sigma(sample.lambda, epsilon, 0.0)) throw RegionError("lambda outside the sector");
    const double r2 = sample.xi_norm2();
    SectorInequalityReport rep;
    rep.lhs = std::abs(a * sample.lambda + r2);
    rep.rhs = std::sin(epsilon / 2) * (a * std::abs(sample.lambda) + r2);
    rep.holds = rep.lhs >= rep.rhs;
    return rep;
}

}  // namespace fslab
