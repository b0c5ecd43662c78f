#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <string>

namespace fslab {

using cplx = std::complex<double>;

// Physical constants of the linearized compressible model.
struct FluidParams {
    double mu = 1.0;
    double nu = 1.0;
    double sigma = 1.0;
    double m = 1.0;
    double gamma1 = 1.0;
    double gamma3 = 1.0;
    cplx zeta{0.0, 0.0};
    double zeta0 = 1.0;
    double rho1 = 1.0;
    double rho2 = 1.0;
    double rho3 = 1.0;
};

// Throws ParameterError when an invariant of FluidParams fails.
void validate(const FluidParams& p);

// Constants after division by gamma1.
struct ReducedParams {
    double alpha = 1.0;
    double beta = 0.0;
    cplx zetaPrime{0.0, 0.0};
    double sigmaPrime = 1.0;
};

ReducedParams reduce_params(const FluidParams& p);

enum class ZetaCase { C1, C2, C3 };

const char* to_string(ZetaCase c);
ZetaCase zeta_case_from_string(const std::string& s);

struct SectorSpec {
    double epsilon = std::numbers::pi / 4.0;
    double lambda0 = 1.0;
    ZetaCase zetaCase = ZetaCase::C3;
    double rho3OverNu = 1.0;  // radius offset of the excluded disk
};

void validate(const SectorSpec& s);

// A resolvent parameter together with a tangential frequency (1 or 2 components).
struct SpectralPoint {
    cplx lambda{1.0, 0.0};
    std::array<double, 2> xi{0.0, 0.0};
    int dim = 1;

    double tau() const { return lambda.imag(); }
    double xi_norm2() const { return dim == 1 ? xi[0] * xi[0] : xi[0] * xi[0] + xi[1] * xi[1]; }
};

// Coefficients entering the half-space symbols: reduced viscosities and the
// reduced zeta and sigma, with zeta resolved for the chosen case.
struct SymbolParams {
    double alpha = 1.0;
    double beta = 0.0;
    cplx zeta{0.0, 0.0};
    double sigma = 1.0;
    double m = 1.0;
};

// Unreduced zeta for the case: 1/lambda in case C1, params.zeta otherwise.
cplx effective_zeta(const FluidParams& p, ZetaCase c, cplx lambda);

SymbolParams symbol_params(const FluidParams& p, ZetaCase c, cplx lambda);

// Density pressure weight that makes the density elimination exact:
// zeta * gamma3 = gamma1 * gamma2 / lambda.
cplx pressure_coupling(const FluidParams& p, ZetaCase c, cplx lambda);

}  // namespace fslab
